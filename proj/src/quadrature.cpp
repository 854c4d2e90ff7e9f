#include "kaclab/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace kaclab {

namespace {
using GL16 = boost::math::quadrature::gauss<double, 16>;

void add_panel(NodeSet& ns, double a, double b) {
    const auto& xs = GL16::abscissa();  // nonnegative half
    const auto& ws = GL16::weights();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ns.x.push_back(c - h * xs[i]);
        ns.w.push_back(h * ws[i]);
        if (xs[i] != 0.0) {
            ns.x.push_back(c + h * xs[i]);
            ns.w.push_back(h * ws[i]);
        }
    }
}
}  // namespace

void NodeSet::append(const NodeSet& o) {
    x.insert(x.end(), o.x.begin(), o.x.end());
    w.insert(w.end(), o.w.begin(), o.w.end());
}

NodeSet gl_panels(double a, double b, int panels) {
    NodeSet ns;
    panels = std::max(panels, 1);
    ns.x.reserve(16 * panels);
    ns.w.reserve(16 * panels);
    double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) add_panel(ns, a + i * h, i + 1 == panels ? b : a + (i + 1) * h);
    return ns;
}

NodeSet gl_cover(double a, double b, double h_max, int min_panels) {
    int n = static_cast<int>(std::ceil((b - a) / h_max));
    return gl_panels(a, b, std::max(n, min_panels));
}

NodeSet gl_edges(const std::vector<double>& edges) {
    NodeSet ns;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (edges[i + 1] > edges[i]) add_panel(ns, edges[i], edges[i + 1]);
    return ns;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, &err);
    return {v, err};
}

}  // namespace kaclab
