// Inversion with the p-integral done in closed form.
//
// hhat^N expands binomially into products of single-Maxwellian transforms,
// each Gaussian in p, so the radial p-integral (the Bessel transform) is exact
// and only the t-integral is numerical. The t-integral runs on [0, T] along
// the real axis and then up the vertical line Re t = T, where e^{2 pi i t u}
// decays exponentially; all branch points sit on the positive imaginary axis.
#include <algorithm>
#include <cmath>
#include <numbers>

#include "kaclab/charfn.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"

namespace kaclab {

std::unique_ptr<Inverter> make_bessel_inverter(const GeneratingFunction& g, int N, const CharFnGrid& grid,
                                               double u_max, double z_max);

namespace {

using std::numbers::pi;

class BinomialInverter final : public Inverter {
public:
    BinomialInverter(const GeneratingFunction& g, int N, const CharFnGrid& grid, double u_max, double z_max)
        : g_(g), d_(g.d()) {
        N_ = N;
        if (N < 2) throw ParameterError("inversion needs N >= 2");
        const auto& cs = g.components();
        a0_ = cs.front().a;
        a1_ = cs.back().a;
        if (g.is_single()) {
            terms_.push_back({N, 0.0});
        } else {
            double lw0 = std::log(cs[0].weight), lw1 = std::log(cs[1].weight);
            std::vector<Term> all;
            double mx = -INFINITY;
            for (int k = 0; k <= N; ++k) {
                double lw = std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0) + k * lw0 +
                            (N - k) * lw1;
                all.push_back({k, lw});
                mx = std::max(mx, lw);
            }
            for (auto& t : all)
                if (t.lw > mx - 45.0) terms_.push_back(t);
        }

        double amin = std::min(a0_, a1_), amax = std::max(a0_, a1_);
        if (grid.t_max > 0.0) {
            T_ = grid.t_max;
        } else {
            double e0 = envelope(0.0), cap = 100.0 / (4.0 * pi * amin);
            T_ = 1e-3 / (4.0 * pi * amax);
            while (T_ < cap && envelope(T_) > 1e-10 * e0) T_ *= 1.15;
            T_ = std::min(T_, cap);
            // With z != 0 the terms have essential singularities on the imaginary axis (where A vanishes);
            // keep the vertical line far enough away that it carries no large cancelling mass.
            if (z_max > 0.0) {
                // u >= z^2/N only bounds the damping e^{-2 pi y u} by the smallest z in play, so scan z^2 too
                double yhi = 2.0 / (4.0 * pi * amin);
                auto worst = [&](double T) {
                    double m = 0.0;
                    for (int iz = 1; iz <= 12; ++iz) {
                        double z2 = z_max * z_max * iz / 12.0;
                        for (int i = 0; i <= 400; ++i) {
                            double y = yhi * i / 400.0;
                            m = std::max(m, std::abs(G(cplx(T, y), z2)) * std::exp(-2.0 * pi * y * z2 / N));
                        }
                    }
                    return m;
                };
                while (T_ < cap && worst(T_) > e0) T_ *= 1.25;
                T_ = std::min(T_, cap);
            }
        }
        double kmax = 0.0;
        for (auto& t : terms_) kmax = std::max(kmax, t.k * a0_ + (N - t.k) * a1_);
        double rate = std::max(u_max, 0.0) + d_ * kmax + z_max * z_max * std::max(amax / (N * amin), 1.0 / N) + 1.0;
        double h = grid.cycles_per_panel / rate;
        nodes_ = grid.n_t > 0 ? gl_panels(0.0, T_, grid.n_t) : gl_cover(0.0, T_, h, 4);

        const std::size_t nt = nodes_.size(), nk = terms_.size();
        base_.resize(nt * nk);
        cinv_.resize(nt * nk);
        parallel_for(nt, [&](std::size_t j) {
            for (std::size_t k = 0; k < nk; ++k) {
                auto [lb, ci] = term_parts(cplx(nodes_.x[j], 0.0), terms_[k]);
                base_[j * nk + k] = std::exp(lb);
                cinv_[j * nk + k] = ci;
            }
        });
    }

    std::size_t node_count() const override { return nodes_.size(); }

    InversionResult at(double zmod, double u) const override {
        std::vector<cplx> row = g_row(zmod * zmod);
        return finish(row, zmod * zmod, u);
    }

    std::vector<InversionResult> table(const std::vector<double>& zs, const std::vector<double>& us) const override {
        std::vector<std::vector<cplx>> rows(zs.size());
        parallel_for(zs.size(), [&](std::size_t i) { rows[i] = g_row(zs[i] * zs[i]); });
        std::vector<InversionResult> out(zs.size() * us.size());
        parallel_for(out.size(), [&](std::size_t k) {
            std::size_t iz = k / us.size(), iu = k % us.size();
            out[k] = finish(rows[iz], zs[iz] * zs[iz], us[iu]);
        });
        return out;
    }

    std::vector<InversionResult> pairs(const std::vector<std::pair<double, double>>& zu) const override {
        std::vector<InversionResult> out(zu.size());
        parallel_for(zu.size(), [&](std::size_t k) {
            double z2 = zu[k].first * zu[k].first;
            out[k] = finish(g_row(z2), z2, zu[k].second);
        });
        return out;
    }

private:
    struct Term {
        int k;
        double lw;
    };

    // log of the z-independent part, and the coefficient c with G_k = base * exp(z2 * c)
    std::pair<cplx, cplx> term_parts(cplx t, const Term& tm) const {
        cplx w0 = 1.0 + 4.0 * pi * cplx(0, 1) * a0_ * t;
        cplx w1 = 1.0 + 4.0 * pi * cplx(0, 1) * a1_ * t;
        int k = tm.k, m = N_ - tm.k;
        cplx A = double(k) * a0_ / w0 + double(m) * a1_ / w1;
        cplx lb = tm.lw - 0.5 * d_ * std::log(2.0 * pi * A);
        if (k) lb -= 0.5 * d_ * k * std::log(w0);
        if (m) lb -= 0.5 * d_ * m * std::log(w1);
        return {lb, -0.5 / A};
    }

    cplx G(cplx t, double z2) const {
        cplx s = 0.0;
        for (auto& tm : terms_) {
            auto [lb, c] = term_parts(t, tm);
            s += std::exp(lb + z2 * c);
        }
        return s;
    }

    double envelope(double t) const {
        double s = 0.0;
        for (auto& tm : terms_) s += std::exp(term_parts(cplx(t, 0.0), tm).first.real());
        return s;
    }

    std::vector<cplx> g_row(double z2) const {
        const std::size_t nt = nodes_.size(), nk = terms_.size();
        std::vector<cplx> row(nt);
        for (std::size_t j = 0; j < nt; ++j) {
            cplx s = 0.0;
            const cplx* b = &base_[j * nk];
            const cplx* c = &cinv_[j * nk];
            if (z2 == 0.0)
                for (std::size_t k = 0; k < nk; ++k) s += b[k];
            else
                for (std::size_t k = 0; k < nk; ++k) s += b[k] * std::exp(z2 * c[k]);
            row[j] = s;
        }
        return row;
    }

    InversionResult finish(const std::vector<cplx>& row, double z2, double u) const {
        InversionResult r;
        double gap = u - z2 / N_;
        if (!(gap > 0.0)) return r;  // outside the support of (sum v, sum |v|^2)
        cplx S = 0.0;
        double absmass = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            cplx term = nodes_.w[j] * row[j] * std::exp(cplx(0.0, 2.0 * pi * nodes_.x[j] * u));
            S += term;
            absmass += std::abs(term);
        }
        // vertical line t = T + i y
        double ell = 1.0 / (2.0 * pi * gap);
        double y = 0.0, h = std::min(ell, T_) / 4.0, peak = 0.0, last = 0.0;
        cplx V = 0.0;
        const cplx phase0 = std::exp(cplx(0.0, 2.0 * pi * T_ * u));
        for (int p = 0; p < 600; ++p) {
            NodeSet ns = gl_panels(y, y + h, 1);
            cplx pv = 0.0;
            double pabs = 0.0, endmag = 0.0;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                cplx t(T_, ns.x[i]);
                cplx f = G(t, z2) * phase0 * std::exp(-2.0 * pi * ns.x[i] * u);
                pv += ns.w[i] * f;
                pabs += ns.w[i] * std::abs(f);
                endmag = std::abs(f);  // nodes ascend within the panel pairwise; last pair is near the end
                peak = std::max(peak, std::abs(f));
            }
            V += cplx(0.0, 1.0) * pv;
            absmass += pabs;
            last = pabs;
            y += h;
            h *= 1.3;
            if (y > 10.0 * ell && endmag * y < 1e-18 * std::max(absmass, 1e-300)) break;
        }
        cplx total = 2.0 * (S + V);
        r.raw = total.real();
        r.value = std::max(r.raw, 0.0);
        r.imag_residue = 0.0;  // the t < 0 half is the conjugate, so the imaginary part cancels identically
        r.error_estimate = 2.0 * (1e-15 * absmass * 64.0 + last * 1e-16);
        r.tail_mass = 0.0;
        (void)peak;
        return r;
    }

    GeneratingFunction g_;
    int d_;
    double a0_, a1_, T_ = 0.0;
    std::vector<Term> terms_;
    NodeSet nodes_;
    std::vector<cplx> base_, cinv_;
};

}  // namespace

std::unique_ptr<Inverter> make_inverter(const GeneratingFunction& g, int N, const CharFnGrid& grid, double u_max,
                                        double z_max) {
    if (grid.rule == "binomial") return std::make_unique<BinomialInverter>(g, N, grid, u_max, z_max);
    if (grid.rule == "bessel") return make_bessel_inverter(g, N, grid, u_max, z_max);
    throw ParameterError("unknown grid rule '" + grid.rule + "'");
}

}  // namespace kaclab
