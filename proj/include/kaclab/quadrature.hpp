#pragma once
#include <functional>
#include <vector>

namespace kaclab {

struct NodeSet {
    std::vector<double> x, w;
    std::size_t size() const { return x.size(); }
    void append(const NodeSet& o);
};

// 16-point Gauss-Legendre on [a,b] split into `panels` equal panels.
NodeSet gl_panels(double a, double b, int panels);
// Panels with widths no larger than h_max, at least min_panels.
NodeSet gl_cover(double a, double b, double h_max, int min_panels = 1);
// Panel edges given explicitly.
NodeSet gl_edges(const std::vector<double>& edges);

// Adaptive Gauss-Kronrod on [a,b] (b may be +inf); returns value and error estimate.
struct QuadResult {
    double value, error;
};
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

}  // namespace kaclab
