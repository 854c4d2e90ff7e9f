#include "kaclab/bounds.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

using std::numbers::pi;

std::string CheckReport::to_json() const {
    nlohmann::json p = nlohmann::json::object();
    for (auto& [k, v] : params) p[k] = v;
    nlohmann::json j{{"check", check}, {"params", p}, {"margin", margin}, {"status", status}};
    j["fitted_constant"] = has_constant ? nlohmann::json(fitted_constant) : nlohmann::json(nullptr);
    return j.dump();
}

// ---------------------------------------------------------------- tail bounds

TailBounds gaussian_tail_bounds_check(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta >= 0.0)) throw ParameterError("tail bounds: need alpha > 0, beta >= 0");
    TailBounds r{};
    auto q1 = integrate([&](double x) { return std::exp(-alpha * x * x); }, beta, INFINITY, 1e-14);
    auto q2 = integrate([&](double x) { return x * std::exp(-alpha * x * x); }, beta, INFINITY, 1e-14);
    QuadResult q3{0.0, 0.0};
    if (beta > 0.0) q3 = integrate([&](double x) { return std::exp(-alpha * x * x); }, 0.0, beta, 1e-14);
    double e = std::exp(-0.5 * alpha * beta * beta);
    r.lhs = {q1.value, q2.value, q3.value};
    r.quad_err = {q1.error, q2.error, q3.error};
    r.rhs = {std::sqrt(pi / (4.0 * alpha)) * e, e / (2.0 * alpha),
             std::sqrt(pi / (4.0 * alpha)) * std::sqrt(-std::expm1(-2.0 * alpha * beta * beta))};
    r.margin = INFINITY;
    bool fail = false, unsure = false;
    for (int i = 0; i < 3; ++i) {
        double slack = r.rhs[i] - r.lhs[i];
        double tol = 4.0 * r.quad_err[i] + 1e-13 * std::max(r.rhs[i], r.lhs[i]) + 1e-300;
        if (r.rhs[i] == 0.0 && r.lhs[i] == 0.0) {
            r.margin = std::min(r.margin, 0.0);
            continue;
        }
        r.margin = std::min(r.margin, slack / std::max(r.rhs[i], 1e-300));
        if (slack < -tol) fail = true;
        if (r.quad_err[i] > 1e-6 * std::max(r.lhs[i], 1e-300) && r.lhs[i] > 1e-250) unsure = true;
    }
    r.status = fail ? (unsure ? "inconclusive" : "fail") : "pass";
    return r;
}

FuzzSummary fuzz_gaussian_tail_bounds(long long n, std::uint64_t seed) {
    FuzzSummary s;
    s.min_margin = INFINITY;
    Rng rng(seed);
    for (long long i = 0; i < n; ++i) {
        double a = 10.0 * (1.0 - rng.uniform());  // (0,10]
        double b = 10.0 * (1.0 - rng.uniform());
        auto r = gaussian_tail_bounds_check(a, b);
        ++s.trials;
        if (r.status == "fail") ++s.violations;
        if (r.status == "inconclusive") ++s.inconclusive;
        if (r.margin < s.min_margin) {
            s.min_margin = r.margin;
            s.worst = {a, b};
        }
    }
    return s;
}

// ---------------------------------------------------------------- radial tails

double radial_tail_quadrature(int m, int d, double alpha, double beta) {
    auto q = integrate([&](double r) { return std::pow(r, m + d - 1) * std::exp(-alpha * r * r); }, beta, INFINITY,
                       1e-13);
    return std::exp(log_sphere_area(d)) * q.value;
}

double radial_tail_closed(int m, int d, double alpha, double beta) {
    double s = 0.5 * (m + d);
    return std::exp(log_sphere_area(d)) * 0.5 * std::pow(alpha, -s) * boost::math::tgamma(s, alpha * beta * beta);
}

double radial_shape_ratio(int m, int d, double alpha, double beta) {
    double lhs = radial_tail_closed(m, d, alpha, beta);
    double mx = 1.0;
    for (int e = m + d - 2; e >= 0; e -= 2) mx = std::max(mx, std::pow(beta, e));
    int top = (m + d + 2) / 2;
    double mn = INFINITY;
    for (int e = 1; e <= std::max(top, 1); ++e) mn = std::min(mn, std::pow(alpha, e));
    return lhs * std::exp(0.5 * alpha * beta * beta) * mn / mx;
}

RadialFit radial_tail_fit(int m, int d, long long n, std::uint64_t seed) {
    Rng rng(seed);
    RadialFit f{0.0, 0.0, n};
    for (long long i = 0; i < n; ++i) {
        double alpha = std::exp(std::log(100.0) * rng.uniform());
        double beta = 1.0 - rng.uniform();
        f.shape_constant = std::max(f.shape_constant, radial_shape_ratio(m, d, alpha, beta));
        double lhs = radial_tail_closed(m, d, alpha, beta);
        f.unit_alpha_constant = std::max(f.unit_alpha_constant, lhs * alpha * std::exp(0.5 * alpha * beta * beta));
    }
    return f;
}

// ---------------------------------------------------------------- product envelope

namespace {

double log_binom(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

struct Env25 {
    // log of term j of the direct expansion and of the envelope
    double direct, envelope;
};

Env25 env25_term(const GeneratingFunction& g, int N, int k, int j, double rho, double t) {
    const int d = g.d();
    const double dl = g.delta(), s2 = g.sigma_sq();
    const double a1 = g.a1(), a2 = g.a2();
    double lh1 = log_h_hat_single(a1, d, rho, t).real();
    double lh2 = log_h_hat_single(a2, d, rho, t).real();
    double lg = -2.0 * pi * pi * (rho * rho / d + s2 * t * t);
    double direct =
        log_binom(k, j) + j * (std::log(dl) + lh1) + (k - j) * (std::log1p(-dl) + lh2) + (N - k - 1) * lg;
    double q1 = 1.0 + 4.0 * pi * pi * t * t / (d * d * dl * dl);
    double q2 = 1.0 + 4.0 * pi * pi * t * t / (d * d * (1 - dl) * (1 - dl));
    double pe = j * d * dl / (d * d * dl * dl + 4 * pi * pi * t * t) +
                (k - j) * d * (1 - dl) / (d * d * (1 - dl) * (1 - dl) + 4 * pi * pi * t * t) + 2.0 * (N - k - 1) / d;
    double envelope = log_binom(k, j) + j * std::log(dl) - 0.25 * d * j * std::log(q1) + (k - j) * std::log1p(-dl) -
                      0.25 * d * (k - j) * std::log(q2) - pi * pi * rho * rho * pe -
                      2.0 * pi * pi * (N - k - 1) * s2 * t * t;
    return {direct, envelope};
}

double logsumexp(const std::vector<double>& v) {
    double m = -INFINITY;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

void envelope_trial(const GeneratingFunction& g, int N, int k, int jsel, double rho, double t, EnvelopeSummary& s) {
    const double tol = 1e-12;
    std::vector<double> env;
    for (int j = 0; j <= k; ++j) {
        auto e = env25_term(g, N, k, j, rho, t);
        env.push_back(e.envelope);
        if (jsel >= 0 && j != jsel) continue;
        double m = e.envelope - e.direct;
        ++s.trials;
        if (m < -tol * std::max(1.0, std::abs(e.envelope))) ++s.violations;
        if (m < s.min_log_margin) {
            s.min_log_margin = m;
            s.worst = {rho, t, double(k), double(j), double(N)};
        }
    }
    // the full product of moduli against the summed envelope
    double direct = k * std::log(std::abs(h_hat(g, rho, t))) +
                    (N - k - 1) * (-2.0 * pi * pi * (rho * rho / g.d() + g.sigma_sq() * t * t));
    double m = logsumexp(env) - direct;
    ++s.trials;
    if (m < -tol * std::max(1.0, std::abs(direct))) ++s.violations;
    if (m < s.min_log_margin) {
        s.min_log_margin = m;
        s.worst = {rho, t, double(k), -1.0, double(N)};
    }
}

}  // namespace

EnvelopeSummary product_envelope_check(const GeneratingFunction& g, double beta, int k, int j, int N,
                                       long long samples, std::uint64_t seed) {
    if (g.is_single()) throw ParameterError("product envelope needs the two-component mixture");
    if (!(0 <= k && k <= N - 1) || j > k) throw ParameterError("product envelope: need 0 <= j <= k <= N-1");
    EnvelopeSummary s;
    s.min_log_margin = INFINITY;
    Rng rng(seed);
    double tc = contraction_edge(g.d(), g.delta(), beta);
    for (long long i = 0; i < samples; ++i) {
        double t = tc * std::exp(std::log(1e4) * (2.0 * rng.uniform() - 1.0) + std::log(10.0));
        if (rng.uniform() < 0.5) t = -t;
        double rho = std::exp(std::log(1e-3) + std::log(1e4) * rng.uniform());
        envelope_trial(g, N, k, j, rho, t, s);
    }
    return s;
}

EnvelopeSummary product_envelope_fuzz(int d, double delta, double beta, long long samples, std::uint64_t seed) {
    GeneratingFunction g(d, delta);
    EnvelopeSummary s;
    s.min_log_margin = INFINITY;
    Rng rng(seed);
    double tc = contraction_edge(d, delta, beta);
    for (long long i = 0; i < samples; ++i) {
        int N = 4 + static_cast<int>(rng.below(253));
        int k = static_cast<int>(rng.below(N));
        int j = static_cast<int>(rng.below(k + 1));
        double t = tc * std::exp(std::log(1e4) * (2.0 * rng.uniform() - 1.0) + std::log(10.0));
        if (rng.uniform() < 0.5) t = -t;
        double rho = std::exp(std::log(1e-3) + std::log(1e4) * rng.uniform());
        envelope_trial(g, N, k, j, rho, t, s);
    }
    return s;
}

// ---------------------------------------------------------------- mixture contraction

double mixture_modulus(int d, double delta, double t) {
    double x1 = 4.0 * pi * pi * t * t / (d * d * delta * delta);
    double x2 = 4.0 * pi * pi * t * t / (d * d * (1 - delta) * (1 - delta));
    return delta * std::pow(1.0 + x1, -0.25 * d) + (1.0 - delta) * std::pow(1.0 + x2, -0.25 * d);
}

double contraction_edge(int d, double delta, double beta) { return d * std::pow(delta, 1.0 + beta) / (4.0 * pi); }

std::vector<double> default_contraction_grid() {
    std::vector<double> v;
    for (int i = 0; i <= 24; ++i) v.push_back(0.01 * std::pow(30.0, i / 24.0));  // 0.01 .. 0.3
    return v;
}

double fit_contraction_K(int d, double beta, const std::vector<double>& deltas) {
    double K = -INFINITY;
    for (double dl : deltas) {
        double v = mixture_modulus(d, dl, contraction_edge(d, dl, beta));
        K = std::max(K, (v - 1.0 + d * std::pow(dl, 1.0 + 2.0 * beta) / 16.0) / std::pow(dl, 1.0 + 4.0 * beta));
    }
    return K;
}

ContractionResult mixture_contraction_check(const GeneratingFunction& g, double beta, double K) {
    if (g.is_single()) throw ParameterError("contraction check needs the two-component mixture");
    const int d = g.d();
    const double dl = g.delta();
    double te = contraction_edge(d, dl, beta);
    ContractionResult r;
    r.value = mixture_modulus(d, dl, te);
    r.margin = 1.0 - r.value;
    r.bound = 1.0 - d * std::pow(dl, 1.0 + 2.0 * beta) / 16.0 + K * std::pow(dl, 1.0 + 4.0 * beta);
    r.monotone = true;
    double prev = mixture_modulus(d, dl, 0.0);
    for (int i = 1; i <= 400; ++i) {
        double t = te * 4.0 * i / 400.0;
        double v = mixture_modulus(d, dl, t);
        if (v > prev) r.monotone = false;
        prev = v;
    }
    bool ok = r.value < 1.0 && r.value <= r.bound * (1.0 + 1e-14) && r.monotone;
    r.status = ok ? "pass" : "fail";
    return r;
}

// ---------------------------------------------------------------- domain integrals

const char* domain_name(DomainKind k) {
    switch (k) {
        case DomainKind::large_t: return "large_t";
        case DomainKind::small_t_large_p: return "small_t_large_p";
        case DomainKind::small_t_small_p: return "small_t_small_p";
    }
    return "?";
}

DomainSpec DomainSpec::make(DomainKind k, int d, double delta, double beta) {
    if (!(delta > 0.0 && delta < 0.5) || !(beta > 0.0)) throw ParameterError("domain: need 0 < delta < 1/2, beta > 0");
    return {k, delta, beta, contraction_edge(d, delta, beta), std::pow(delta, 0.5 + beta)};
}

double domain_predicted_factor(const DomainSpec& dom, int d, int N, double sigma) {
    const double dl = dom.delta, b = dom.beta, s2 = sigma * sigma;
    switch (dom.kind) {
        case DomainKind::large_t: {
            double c = 1.0 - d * std::pow(dl, 1.0 + 2.0 * b) / 16.0;
            double e = d * d * s2 * std::pow(dl, 2.0 + 2.0 * b) / 32.0;
            return N / (std::pow(N - 2.0, 0.5 * (d + 1)) * sigma) * std::exp(-(N - 2) * e) +
                   N / sigma * std::pow(c, 0.5 * N) * std::exp(-e) + std::pow(c, N - 5.0);
        }
        case DomainKind::small_t_large_p: {
            double eta = dom.cut_p;
            return N * std::pow(dl, 1.0 + b) * std::exp(-(N - 2) * eta * eta / (4.0 * d)) / (N - 2.0);
        }
        case DomainKind::small_t_small_p:
            return std::pow(dl, 1.5 + 4 * b + 0.5 * d + d * b) / sigma +
                   std::sqrt(double(N)) * std::pow(dl, 1.0 + 3 * b + 0.5 * d + d * b) / sigma;
    }
    return NAN;
}

namespace {

class L1Integrator {
public:
    L1Integrator(const GeneratingFunction& g, int N, const CharFnGrid& grid) : g_(g), N_(N), d_(g.d()), grid_(grid) {
        m2_ = g.second_moment();
        mp_ = m2_ / d_;
        s2_ = g.sigma_sq();
        area_ = std::exp(log_sphere_area(d_));
    }

    double t_end() const {
        if (grid_.t_max > 0.0) return grid_.t_max;
        double amax = std::max(g_.a1(), g_.a2());
        double ref = d_ * std::log(rho_cut(0.0));
        double t = 1e-3 / amax;
        while (t < 1e6) {
            double lh = N_ * log_env(0.0, t) + d_ * std::log(rho_cut(t));
            double lg = -2.0 * pi * pi * N_ * s2_ * t * t + ref;
            if (lh < ref - 40.0 && lg < ref - 40.0) break;
            t *= 1.25;
        }
        return 2.0 * t;
    }

    // int_{t0}^{t1} dt int_{rlo}^{rhi} |S^{d-1}| rho^{d-1} |hhat^N - g1hat^N| drho, rhi < 0 means the envelope cut
    double integrate(double t0, double t1, double rlo, double rhi) const {
        if (!(t1 > t0)) return 0.0;
        std::vector<double> edges{t0};
        double t = t0;
        while (t < t1) {
            double h = grid_.n_t > 0 ? (t1 - t0) / grid_.n_t : 2.0 * pi * grid_.cycles_per_panel / t_rate(t);
            if (grid_.n_t <= 0) h = std::min(h, 2.0 * pi * grid_.cycles_per_panel / t_rate(std::min(t + h, t1)));
            h = std::min(h, (t1 - t0) / 4.0);
            t = std::min(t + h, t1);
            edges.push_back(t);
            if (edges.size() > 400000) throw NumericalError("L1 integral: t grid exceeds node budget");
        }
        NodeSet tn = gl_edges(edges);
        std::vector<double> col(tn.size());
        parallel_for(tn.size(), [&](std::size_t j) { col[j] = rho_integral(tn.x[j], rlo, rhi); });
        double s = 0.0;
        for (std::size_t j = 0; j < tn.size(); ++j) s += tn.w[j] * col[j];
        return 2.0 * s;  // t and -t contribute equally
    }

private:
    double log_env(double rho, double t) const {
        double s = 0.0;
        for (auto& c : g_.components()) {
            double m2 = 1.0 + 16.0 * pi * pi * c.a * c.a * t * t;
            s += c.weight * std::pow(m2, -0.25 * d_) * std::exp(-2.0 * c.a * pi * pi * rho * rho / m2);
        }
        return std::log(s);
    }

    double rho_cut(double t) const {
        double amax = std::max(g_.a1(), g_.a2());
        double m2 = 1.0 + 16.0 * pi * pi * amax * amax * t * t;
        double amin = std::min({g_.a1(), g_.a2(), mp_});
        double step = 0.05 * std::sqrt(m2 / (2.0 * pi * pi * amin * N_));
        double best = -INFINITY, rho = step;
        for (int i = 0; i < 100000; ++i, rho += step) {
            double lg = -2.0 * pi * pi * N_ * (rho * rho * mp_ + s2_ * t * t);
            double q = std::max(N_ * log_env(rho, t), lg) + (d_ - 1) * std::log(rho);
            best = std::max(best, q);
            if (q < best - 9.0) return 2.0 * rho;
        }
        return 2.0 * rho;
    }

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

    double t_rate(double t) const {
        double rc = rho_cut(std::abs(t)), r = 0.0;
        for (double f : {0.0, 0.25, 0.5, 1.0}) r = std::max(r, std::abs(dlog(f * rc, t).first.imag() + 2.0 * pi * m2_));
        return N_ * std::min(r, 1e8) + 1.0;
    }

    double rho_integral(double t, double rlo, double rhi) const {
        double top = rhi >= 0.0 ? rhi : rho_cut(std::abs(t));
        if (grid_.rho_max > 0.0 && rhi < 0.0) top = grid_.rho_max;
        if (!(top > rlo)) return 0.0;
        std::vector<double> edges{rlo};
        double rho = rlo;
        while (rho < top) {
            double h;
            if (grid_.n_rho > 0) {
                h = (top - rlo) / grid_.n_rho;
            } else {
                auto rate = [&](double x) { return N_ * std::abs(dlog(x, t).second.imag()) + 1e-300; };
                h = 2.0 * pi * grid_.cycles_per_panel / rate(rho);
                h = std::min(h, 2.0 * pi * grid_.cycles_per_panel / rate(std::min(rho + h, top)));
                h = std::min(h, (top - rlo) / 4.0);
            }
            rho = std::min(rho + h, top);
            edges.push_back(rho);
            if (edges.size() > 40000) throw NumericalError("L1 integral: rho grid exceeds node budget");
        }
        NodeSet rn = gl_edges(edges);
        double s = 0.0;
        for (std::size_t i = 0; i < rn.size(); ++i) {
            double r = rn.x[i];
            cplx diff = h_hat_pow(g_, N_, r, t) - gamma1_hat_pow(g_, N_, r, t);
            s += rn.w[i] * std::pow(r, d_ - 1) * std::abs(diff);
        }
        return area_ * s;
    }

    const GeneratingFunction& g_;
    int N_, d_;
    CharFnGrid grid_;
    double m2_, mp_, s2_, area_;
};

}  // namespace

DomainResult domain_l1_integral(const GeneratingFunction& g, int N, const DomainSpec& dom, const CharFnGrid& grid) {
    if (g.is_single()) throw ParameterError("domain integrals need the two-component mixture");
    L1Integrator L(g, N, grid);
    double T = std::max(L.t_end(), 2.0 * dom.cut_t);
    double v = 0.0;
    switch (dom.kind) {
        case DomainKind::large_t: v = L.integrate(dom.cut_t, T, 0.0, -1.0); break;
        case DomainKind::small_t_large_p: v = L.integrate(0.0, dom.cut_t, dom.cut_p, -1.0); break;
        case DomainKind::small_t_small_p: v = L.integrate(0.0, dom.cut_t, 0.0, dom.cut_p); break;
    }
    return {v, domain_predicted_factor(dom, g.d(), N, std::sqrt(g.sigma_sq()))};
}

double full_l1_integral(const GeneratingFunction& g, int N, const CharFnGrid& grid) {
    L1Integrator L(g, N, grid);
    return L.integrate(0.0, L.t_end(), 0.0, -1.0);
}

TotalL1 total_l1_error(const GeneratingFunction& g, int N, double beta, const CharFnGrid& grid) {
    TotalL1 r{};
    int i = 0;
    for (auto k : {DomainKind::large_t, DomainKind::small_t_large_p, DomainKind::small_t_small_p}) {
        auto dom = DomainSpec::make(k, g.d(), g.delta(), beta);
        r.parts[i++] = domain_l1_integral(g, N, dom, grid).value;
    }
    r.total = r.parts[0] + r.parts[1] + r.parts[2];
    r.scaled = r.total * std::sqrt(g.sigma_sq()) * std::pow(double(N), 0.5 * (g.d() + 1));
    return r;
}

}  // namespace kaclab
