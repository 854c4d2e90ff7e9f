#include "kaclab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

using std::numbers::pi;

ConditionedFamily ConditionedFamily::make(const GeneratingFunction& g, int N, const CharFnGrid& grid) {
    if (N < 4) throw ParameterError("conditioned family needs N >= 4");
    std::vector<double> z(g.d(), 0.0);
    return {g, N, grid, z_n(g, N, double(N), z, grid)};
}

EntropyResult entropy_HN(const ConditionedFamily& fam, int radial_panels) {
    const auto& g = fam.g;
    const int N = fam.N, d = g.d();
    // v1 is admissible while N - |v1|^2 > |v1|^2 / (N-1)
    const double R = std::sqrt(N - 1.0);
    double amin = std::min(g.a1(), g.a2());
    int panels = radial_panels > 0 ? radial_panels : std::max(40, int(std::ceil(R / (0.25 * std::sqrt(amin)))));
    NodeSet rn = gl_panels(0.0, R, panels);

    std::vector<std::pair<double, double>> zu;
    for (double r : rn.x) zu.push_back({r, N - r * r});
    auto inv = make_inverter(g, N - 1, fam.grid, double(N), R);
    auto h1 = inv->pairs(zu);

    const double log_hn = std::log(fam.log_zn.hN_value);
    const double area = std::exp(log_sphere_area(d));
    double mass = 0.0, I1 = 0.0;
    for (std::size_t i = 0; i < rn.size(); ++i) {
        double r = rn.x[i];
        if (!(h1[i].value > 0.0)) continue;
        double lf = g.log_pdf_r2(r * r);
        double m = area * std::pow(r, d - 1) * std::exp(lf + std::log(h1[i].value) - log_hn);
        mass += rn.w[i] * m;
        I1 += rn.w[i] * m * lf;
    }
    double lz = fam.log_zn.log_zn;
    double H = N * I1 - lz;
    return {H, H / N, I1, lz, mass, static_cast<int>(rn.size())};
}

LimitComponents entropy_limit_components(const ConditionedFamily& fam, const EntropyResult& h) {
    const int d = fam.g.d();
    double i1 = 0.5 * d * (std::log(double(d)) - std::log(pi) - 1.0);
    return {h.I1, i1, h.log_zn / fam.N, i1 - 0.5 * d * std::log(2.0), h.H_over_N};
}

LimitComponents entropy_limit_components(const ConditionedFamily& fam) {
    return entropy_limit_components(fam, entropy_HN(fam));
}

double collision_log_ratio(const GeneratingFunction& g, std::span<const double> v1, std::span<const double> v2,
                           std::span<const double> omega) {
    const int d = g.d();
    double rel2 = 0.0, s1 = 0.0, s2 = 0.0, p1 = 0.0, p2 = 0.0;
    for (int k = 0; k < d; ++k) rel2 += (v1[k] - v2[k]) * (v1[k] - v2[k]);
    double half = 0.5 * std::sqrt(rel2);
    for (int k = 0; k < d; ++k) {
        double c = 0.5 * (v1[k] + v2[k]);
        double a = c + half * omega[k], b = c - half * omega[k];
        s1 += v1[k] * v1[k];
        s2 += v2[k] * v2[k];
        p1 += a * a;
        p2 += b * b;
    }
    return g.log_pdf_r2(s1) + g.log_pdf_r2(s2) - g.log_pdf_r2(p1) - g.log_pdf_r2(p2);
}

double production_term(double x) { return -std::expm1(-x) * x; }

double symmetric_production_kernel(const GeneratingFunction& g, std::span<const double> v1,
                                   std::span<const double> v2, std::span<const double> omega) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < g.d(); ++k) {
        s1 += v1[k] * v1[k];
        s2 += v2[k] * v2[k];
    }
    double lp = g.log_pdf_r2(s1) + g.log_pdf_r2(s2);
    double x = collision_log_ratio(g, v1, v2, omega);
    return std::exp(lp) * production_term(x);
}

namespace {

// log h^{*n}(z,u) minus its singular power, on a uniform (R^2, |z|^2) grid
class LogTable {
public:
    LogTable(const Inverter& inv, int d, int n, double r_lo, double r_hi, int nr, double w_hi, int nw)
        : pw_(0.5 * (d * (n - 1) - 2)), n_(n), rlo_(r_lo), wlo_(0.0), nr_(nr), nw_(nw) {
        hr_ = (r_hi - r_lo) / (nr - 1);
        hw_ = w_hi / (nw - 1);
        std::vector<std::pair<double, double>> zu;
        for (int iw = 0; iw < nw; ++iw)
            for (int ir = 0; ir < nr; ++ir) {
                double w = iw * hw_, r2 = rlo_ + ir * hr_;
                zu.push_back({std::sqrt(w), r2 + w / n});
            }
        auto res = inv.pairs(zu);
        vals_.resize(res.size());
        ok_ = true;
        for (std::size_t i = 0; i < res.size(); ++i) {
            if (!(res[i].raw > 0.0)) ok_ = false;
            double r2 = rlo_ + (i % nr) * hr_;
            vals_[i] = std::log(std::max(res[i].raw, 1e-300)) - pw_ * std::log(r2);
        }
    }

    bool ok() const { return ok_; }

    double log_h(double r2, double w) const { return interp(r2, w) + pw_ * std::log(r2); }

private:
    static void stencil(double x, double lo, double h, int n, int& i0, double wt[4]) {
        double s = (x - lo) / h;
        i0 = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, n - 4);
        double u = s - i0;
        wt[0] = -(u - 1) * (u - 2) * (u - 3) / 6.0;
        wt[1] = u * (u - 2) * (u - 3) / 2.0;
        wt[2] = -u * (u - 1) * (u - 3) / 2.0;
        wt[3] = u * (u - 1) * (u - 2) / 6.0;
    }

    double interp(double r2, double w) const {
        int ir, iw;
        double a[4], b[4];
        stencil(r2, rlo_, hr_, nr_, ir, a);
        stencil(w, wlo_, hw_, nw_, iw, b);
        double s = 0.0;
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) s += b[j] * a[i] * vals_[(iw + j) * nr_ + ir + i];
        return s;
    }

    double pw_;
    int n_;
    double rlo_, wlo_, hr_, hw_;
    int nr_, nw_;
    std::vector<double> vals_;
    bool ok_;
};

struct PairSample {
    double r2, w, term;
};

}  // namespace

ProductionResult entropy_production_DN(const ConditionedFamily& fam, const ProductionOptions& opt,
                                       std::uint64_t seed) {
    const auto& g = fam.g;
    const int N = fam.N, d = g.d(), n = N - 2;
    if (N < 6) throw ParameterError("entropy production needs N >= 6");
    if (opt.samples < 10000) throw ParameterError("entropy production needs a budget of at least 1e4 samples");
    if (opt.directions < 1 || opt.chunks < 1) throw ParameterError("entropy production: bad options");
    if (opt.mode != "exact" && opt.mode != "surrogate")
        throw ParameterError("entropy production: mode must be exact or surrogate");
    if (opt.table_r < 4 || opt.table_w < 4) throw ParameterError("entropy production: table needs >= 4 nodes");

    // draws from f (x) f, one term per draw after averaging over omega
    std::vector<PairSample> smp(opt.samples);
    const long long per = (opt.samples + opt.chunks - 1) / opt.chunks;
    parallel_for(opt.chunks, [&](std::size_t c) {
        Rng rng = Rng::derive(seed, c);
        std::vector<double> v1(d), v2(d), om(d);
        long long lo = c * per, hi = std::min<long long>(opt.samples, lo + per);
        for (long long i = lo; i < hi; ++i) {
            g.sample(rng, v1);
            g.sample(rng, v2);
            double w = 0.0, e = 0.0;
            for (int k = 0; k < d; ++k) {
                w += (v1[k] + v2[k]) * (v1[k] + v2[k]);
                e += v1[k] * v1[k] + v2[k] * v2[k];
            }
            double acc = 0.0;
            for (int q = 0; q < opt.directions; ++q) {
                rng.unit_vector(om);
                acc += production_term(collision_log_ratio(g, v1, v2, om));
            }
            smp[i] = {N - e - w / n, w, acc / opt.directions};
        }
    });

    ProductionResult out{};
    out.samples = opt.samples;
    double r_lo = INFINITY, r_hi = 0.0, w_hi = 0.0;
    for (auto& s : smp) {
        if (!(s.r2 > 0.0)) {
            ++out.outside;
            continue;
        }
        r_lo = std::min(r_lo, s.r2);
        r_hi = std::max(r_hi, s.r2);
        w_hi = std::max(w_hi, s.w);
        if (s.term < 0.0) ++out.negative_terms;
    }

    std::vector<double> ratio(smp.size(), 0.0);
    const double log_hn = std::log(fam.log_zn.hN_value);
    if (opt.mode == "surrogate") {
        double gn = gamma_N_log_density(g, N, double(N), 0.0);
        for (std::size_t i = 0; i < smp.size(); ++i)
            if (smp[i].r2 > 0.0)
                ratio[i] = std::exp(gamma_N_log_density(g, n, smp[i].r2 + smp[i].w / n, std::sqrt(smp[i].w)) - gn);
        out.table_error = NAN;
    } else {
        auto inv = make_inverter(g, n, fam.grid, double(N), std::sqrt(w_hi) + 1e-9);
        double floor = std::max(r_lo, 0.02 * n);
        r_hi = std::max(r_hi, floor * 1.01);
        std::unique_ptr<LogTable> tab;
        for (int attempt = 0; attempt < 6; ++attempt) {
            tab = std::make_unique<LogTable>(*inv, d, n, floor, r_hi, opt.table_r, std::max(w_hi, 1e-6), opt.table_w);
            if (tab->ok()) break;
            floor = 0.5 * (floor + r_hi);
            tab.reset();
        }
        if (!tab) throw NumericalError("entropy production: normalization table not positive; refine the grid");

        std::vector<std::size_t> direct;
        for (std::size_t i = 0; i < smp.size(); ++i) {
            if (!(smp[i].r2 > 0.0)) continue;
            if (smp[i].r2 < floor) {
                direct.push_back(i);
                continue;
            }
            ratio[i] = std::exp(tab->log_h(smp[i].r2, smp[i].w) - log_hn);
        }
        if (!direct.empty()) {
            std::vector<std::pair<double, double>> zu;
            for (auto i : direct) zu.push_back({std::sqrt(smp[i].w), smp[i].r2 + smp[i].w / n});
            auto res = inv->pairs(zu);
            for (std::size_t k = 0; k < direct.size(); ++k) ratio[direct[k]] = res[k].value / fam.log_zn.hN_value;
        }
        out.direct_evals = static_cast<long long>(direct.size());

        // spot check of the table against direct inversion
        std::vector<std::pair<double, double>> zu;
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < smp.size() && ids.size() < 16; i += std::max<std::size_t>(1, smp.size() / 16))
            if (smp[i].r2 >= floor) {
                ids.push_back(i);
                zu.push_back({std::sqrt(smp[i].w), smp[i].r2 + smp[i].w / n});
            }
        auto res = inv->pairs(zu);
        out.table_error = 0.0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            double t = std::exp(tab->log_h(smp[ids[k]].r2, smp[ids[k]].w));
            out.table_error = std::max(out.table_error, std::abs(t - res[k].raw) / std::abs(res[k].raw));
        }
    }

    // Welford over the per-draw values 0.5 * ratio * term
    double mean = 0.0, m2 = 0.0;
    long long cnt = 0;
    for (std::size_t i = 0; i < smp.size(); ++i) {
        double x = smp[i].r2 > 0.0 ? 0.5 * ratio[i] * smp[i].term : 0.0;
        ++cnt;
        double dlt = x - mean;
        mean += dlt / cnt;
        m2 += dlt * (x - mean);
    }
    out.pairing = mean;
    out.pairing_se = std::sqrt(m2 / (cnt - 1) / cnt);
    out.D = N * out.pairing;
    out.D_se = N * out.pairing_se;
    bool noisy = !(out.pairing_se <= opt.se_threshold * std::abs(out.pairing));
    out.status = noisy ? "increase-budget" : "ok";
    return out;
}

double gamma_upper_witness(double D, double H) {
    if (!(H > 0.0)) throw ParameterError("gamma witness needs H_N > 0");
    return D / H;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return NAN;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

ScalingStudy scaling_study(int d, double eta, double beta, const std::vector<int>& Ns, const ProductionOptions& opt,
                           std::uint64_t seed, const CharFnGrid& grid) {
    if (Ns.empty()) throw ParameterError("scaling study: empty N list");
    for (int N : Ns) ScheduleParams::make(N, eta, beta, d);
    ScalingStudy st{};
    st.predicted_gamma_slope = -(1.0 - eta);
    std::vector<double> lx, lgap, ld, lgam;
    for (int N : Ns) {
        ScalingRow row{};
        row.N = N;
        row.delta_N = delta_schedule(N, eta);
        row.status = "ok";
        try {
            auto fam = ConditionedFamily::make(GeneratingFunction(d, row.delta_N), N, grid);
            auto h = entropy_HN(fam);
            auto p = entropy_production_DN(fam, opt, seed + static_cast<std::uint64_t>(N));
            row.H_over_N = h.H_over_N;
            row.H_gap = 0.5 * d * std::log(2.0) - h.H_over_N;
            row.D_over_N = p.D / N;
            row.D_se_over_N = p.D_se / N;
            row.gamma_upper_witness = gamma_upper_witness(p.D, h.H);
            row.production_ratio = p.pairing / (row.delta_N * std::log(1.0 / row.delta_N));
            if (p.status != "ok") row.status = p.status;
            lx.push_back(std::log(double(N)));
            lgap.push_back(std::log(std::abs(row.H_gap)));
            ld.push_back(std::log(row.D_over_N));
            lgam.push_back(std::log(row.gamma_upper_witness));
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
            row.H_over_N = row.H_gap = row.D_over_N = row.D_se_over_N = NAN;
            row.gamma_upper_witness = row.production_ratio = NAN;
        }
        st.rows.push_back(row);
    }
    st.slope_gap = ls_slope(lx, lgap);
    st.slope_D = ls_slope(lx, ld);
    st.slope_gamma = ls_slope(lx, lgam);
    return st;
}

}  // namespace kaclab
