// Radial (rho, t) table inversion:
//   h(z,u) = int int hhat^N(rho,t) e^{2 pi i t u} Lambda_d(2 pi rho |z|) rho^{d-1} drho dt
// Slower than the binomial rule and needs absolute integrability, which only
// holds for N > 2(1+d)/d. Used as an independent cross-check.
#include <algorithm>
#include <cmath>
#include <numbers>

#include "kaclab/charfn.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/report.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

namespace {

using std::numbers::pi;

double angular_kernel(int d, double x) {
    if (d == 2) return 2.0 * pi * std::cyl_bessel_j(0.0, x);
    if (x < 1e-4) return 4.0 * pi * (1.0 - x * x / 6.0);
    return 4.0 * pi * std::sin(x) / x;
}

class BesselInverter final : public Inverter {
public:
    BesselInverter(const GeneratingFunction& g, int N, const CharFnGrid& grid, double u_max, double z_max)
        : g_(g), d_(g.d()) {
        N_ = N;
        if (d_ != 2 && d_ != 3) throw ParameterError("bessel rule supports d = 2 and d = 3 only");
        if (!(N > 2.0 * (1.0 + d_) / d_))
            throw ParameterError("bessel rule needs N > 2(1+d)/d for absolute integrability");

        // integrated envelope mass M(t) and its tail
        auto tail = [&](double T) {
            NodeSet ns = gl_panels(std::log(T), std::log(T) + 14.0, 56);
            double s = 0.0;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                double t = std::exp(ns.x[i]);
                s += ns.w[i] * t * mass(t);
            }
            // power-law remainder past T e^14
            double t1 = T * std::exp(14.0);
            double p = 0.5 * d_ * N - d_;
            return s + mass(t1) * t1 / std::max(p - 1.0, 1e-3);
        };
        double amax = std::max(g.a1(), g.a2());
        double total = tail(1e-4 / amax);
        {
            NodeSet ns = gl_panels(0.0, 1e-4 / amax, 2);
            for (std::size_t i = 0; i < ns.size(); ++i) total += ns.w[i] * mass(ns.x[i]);
        }
        double tcut = 1e-3 / amax;
        while (2.0 * tail(tcut) > grid.eps * total && tcut < 1e7) tcut *= 1.25;
        if (grid.t_max > 0.0) {
            T_ = grid.t_max;
            double tm = 2.0 * tail(T_) / total;
            if (tm > grid.eps)
                throw GridTooSmall("bessel rule: tail mass " + fmt_double(tm) + " above eps; try t_max >= " +
                                       fmt_double(2.0 * tcut),
                                   2.0 * rho_cut(2.0 * tcut), 2.0 * tcut);
        } else {
            T_ = 2.0 * tcut;
        }
        tail_rel_ = 2.0 * tail(T_) / total;
        tail_abs_ = 2.0 * tail(T_);

        // t panels on [-T, T] by marching with the local phase rate
        std::vector<double> edges{-T_};
        double t = -T_;
        while (t < T_) {
            double r = t_rate(t, u_max);
            double h = grid.n_t > 0 ? 2.0 * T_ / grid.n_t : 2.0 * pi * grid.cycles_per_panel / r;
            h = std::min(h, T_ / 4.0);
            double r2 = t_rate(std::min(t + h, T_), u_max);
            if (grid.n_t <= 0 && r2 > r) h = std::min(h, 2.0 * pi * grid.cycles_per_panel / r2);
            t = std::min(t + h, T_);
            edges.push_back(t);
        }
        if (edges.size() > 200000) throw NumericalError("bessel rule: t grid exceeds node budget");
        NodeSet tn = gl_edges(edges);
        cols_.resize(tn.size());
        parallel_for(tn.size(), [&](std::size_t j) { build_column(cols_[j], tn.x[j], tn.w[j], grid, z_max); });
        for (auto& c : cols_) nodes_ += c.rho.size();
    }

    std::size_t node_count() const override { return nodes_; }

    InversionResult at(double zmod, double u) const override {
        auto row = z_row(zmod);
        return finish(row, u);
    }

    std::vector<InversionResult> table(const std::vector<double>& zs, const std::vector<double>& us) const override {
        std::vector<std::vector<cplx>> rows(zs.size());
        parallel_for(zs.size(), [&](std::size_t i) { rows[i] = z_row(zs[i]); });
        std::vector<InversionResult> out(zs.size() * us.size());
        parallel_for(out.size(), [&](std::size_t k) { out[k] = finish(rows[k / us.size()], us[k % us.size()]); });
        return out;
    }

private:
    struct Column {
        double t;
        std::vector<double> rho;
        std::vector<cplx> W;  // includes both quadrature weights and rho^{d-1}
        double absW = 0.0;
    };

    double log_env(double rho, double t) const {
        double s = 0.0;
        for (auto& c : g_.components()) {
            double m2 = 1.0 + 16.0 * pi * pi * c.a * c.a * t * t;
            s += c.weight * std::pow(m2, -0.25 * d_) * std::exp(-2.0 * c.a * pi * pi * rho * rho / m2);
        }
        return std::log(s);
    }

    // smallest rho past the peak of rho^{d-1} env^N with 9 nats of decay (36 after doubling)
    double rho_cut(double t) const {
        double amax = std::max(g_.a1(), g_.a2());
        double m2 = 1.0 + 16.0 * pi * pi * amax * amax * t * t;
        double step = 0.05 * std::sqrt(m2 / (2.0 * pi * pi * std::min(g_.a1(), g_.a2()) * N_));
        double best = -INFINITY, rho = step;
        for (int i = 0; i < 100000; ++i, rho += step) {
            double q = N_ * log_env(rho, t) + (d_ - 1) * std::log(rho);
            best = std::max(best, q);
            if (q < best - 9.0) return rho;
        }
        return rho;
    }

    double mass(double t) const {
        double rc = 2.0 * rho_cut(t);
        NodeSet ns = gl_panels(0.0, rc, 8);
        double s = 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i)
            s += ns.w[i] * std::pow(ns.x[i], d_ - 1) * std::exp(N_ * log_env(ns.x[i], t));
        return std::exp(log_sphere_area(d_)) * s;
    }

    // |d/dt arg(hhat^N e^{2 pi i t u})| sampled over the rho box
    double t_rate(double t, double u_max) const {
        double rc = 2.0 * rho_cut(std::abs(t)), r = 0.0;
        for (double f : {0.0, 0.25, 0.5, 1.0}) r = std::max(r, std::abs(dlog(f * rc, t).first.imag()));
        return N_ * std::min(r, 1e8) + 2.0 * pi * u_max + 1.0;
    }

    // (d/dt log hhat, d/drho log hhat)
    std::pair<cplx, cplx> dlog(double rho, double t) const {
        cplx h = 0.0, ht = 0.0, hr = 0.0;
        const cplx I(0.0, 1.0);
        for (auto& c : g_.components()) {
            cplx w = 1.0 + 4.0 * pi * I * c.a * t;
            cplx hc = c.weight * h_hat_single(c.a, d_, rho, t);
            h += hc;
            ht += hc * (2.0 * c.a * pi * pi * rho * rho * 4.0 * pi * I * c.a / (w * w) - 0.5 * d_ * 4.0 * pi * I * c.a / w);
            hr += hc * (-4.0 * c.a * pi * pi * rho / w);
        }
        if (std::abs(h) < 1e-300) return {0.0, 0.0};
        return {ht / h, hr / h};
    }

    void build_column(Column& col, double t, double wt, const CharFnGrid& grid, double z_max) const {
        col.t = t;
        double rmax = grid.rho_max > 0.0 ? grid.rho_max : 2.0 * rho_cut(std::abs(t));
        std::vector<double> edges{0.0};
        double rho = 0.0;
        while (rho < rmax) {
            double h;
            if (grid.n_rho > 0) {
                h = rmax / grid.n_rho;
            } else {
                auto rate = [&](double x) {
                    return N_ * std::abs(dlog(x, t).second.imag()) + 2.0 * pi * z_max + 1e-300;
                };
                h = 2.0 * pi * grid.cycles_per_panel / rate(rho);
                h = std::min(h, 2.0 * pi * grid.cycles_per_panel / rate(std::min(rho + h, rmax)));
                h = std::min(h, rmax / 2.0);
            }
            rho = std::min(rho + h, rmax);
            edges.push_back(rho);
            if (edges.size() > 20000) throw NumericalError("bessel rule: rho grid exceeds node budget");
        }
        NodeSet rn = gl_edges(edges);
        col.rho = rn.x;
        col.W.resize(rn.size());
        for (std::size_t i = 0; i < rn.size(); ++i) {
            col.W[i] = wt * rn.w[i] * std::pow(rn.x[i], d_ - 1) * h_hat_pow(g_, N_, rn.x[i], t);
            col.absW += std::abs(col.W[i]);
        }
    }

    std::vector<cplx> z_row(double z) const {
        std::vector<cplx> row(cols_.size());
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            cplx s = 0.0;
            const auto& c = cols_[j];
            for (std::size_t i = 0; i < c.rho.size(); ++i) s += c.W[i] * angular_kernel(d_, 2.0 * pi * c.rho[i] * z);
            row[j] = s;
        }
        return row;
    }

    InversionResult finish(const std::vector<cplx>& row, double u) const {
        cplx s = 0.0;
        double absm = 0.0;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            s += row[j] * std::exp(cplx(0.0, 2.0 * pi * cols_[j].t * u));
            absm += cols_[j].absW;
        }
        InversionResult r;
        r.raw = s.real();
        r.value = std::max(r.raw, 0.0);
        r.imag_residue = std::abs(s.imag()) / std::max(std::abs(s.real()), 1e-300);
        r.tail_mass = tail_rel_;
        r.error_estimate = tail_abs_ + 1e-15 * absm * angular_kernel(d_, 0.0) * 64.0;
        return r;
    }

    GeneratingFunction g_;
    int d_;
    double T_ = 0.0, tail_rel_ = 0.0, tail_abs_ = 0.0;
    std::vector<Column> cols_;
    std::size_t nodes_ = 0;
};

}  // namespace

std::unique_ptr<Inverter> make_bessel_inverter(const GeneratingFunction& g, int N, const CharFnGrid& grid,
                                               double u_max, double z_max) {
    return std::make_unique<BesselInverter>(g, N, grid, u_max, z_max);
}

}  // namespace kaclab
