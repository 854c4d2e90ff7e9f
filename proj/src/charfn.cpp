#include "kaclab/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/report.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

using std::numbers::pi;
constexpr cplx I1{0.0, 1.0};

cplx log_h_hat_single(double a, int d, double rho, double t) {
    cplx w{1.0, 4.0 * pi * a * t};
    return -2.0 * a * pi * pi * rho * rho / w - 0.5 * d * std::log(w);
}

cplx h_hat_single(double a, int d, double rho, double t) { return std::exp(log_h_hat_single(a, d, rho, t)); }

cplx h_hat(const GeneratingFunction& g, double rho, double t) {
    cplx s = 0.0;
    for (auto& c : g.components()) s += c.weight * h_hat_single(c.a, g.d(), rho, t);
    return s;
}

cplx h_hat_pow(const GeneratingFunction& g, int N, double rho, double t) {
    if (g.is_single()) return std::exp(double(N) * log_h_hat_single(g.a1(), g.d(), rho, t));
    cplx h = h_hat(g, rho, t);
    if (h == 0.0) return 0.0;
    return std::exp(double(N) * std::log(h));
}

namespace {
cplx log_gamma1_hat(const GeneratingFunction& g, double rho, double t) {
    double m2 = g.second_moment(), mp = m2 / g.d(), s2 = g.sigma_sq();
    return cplx{-2.0 * pi * pi * (rho * rho * mp + s2 * t * t), -2.0 * pi * t * m2};
}
}  // namespace

cplx gamma1_hat(const GeneratingFunction& g, double rho, double t) { return std::exp(log_gamma1_hat(g, rho, t)); }

cplx gamma1_hat_pow(const GeneratingFunction& g, int N, double rho, double t) {
    return std::exp(double(N) * log_gamma1_hat(g, rho, t));
}

double gamma_N_log_density(const GeneratingFunction& g, int N, double u, double vmod) {
    const int d = g.d();
    double m2 = g.second_moment(), mp = m2 / d, s2 = g.sigma_sq();
    double du = u - N * m2;
    return -0.5 * d * std::log(2.0 * pi * N * mp) - vmod * vmod / (2.0 * N * mp) - 0.5 * std::log(2.0 * pi * N * s2) -
           du * du / (2.0 * s2 * N);
}

double gamma_N_density(const GeneratingFunction& g, int N, double u, double vmod) {
    return std::exp(gamma_N_log_density(g, N, u, vmod));
}

std::string CharFnGrid::to_json() const {
    nlohmann::json j{{"rule", rule},
                     {"rho_max", rho_max},
                     {"t_max", t_max},
                     {"n_rho", n_rho},
                     {"n_t", n_t},
                     {"cycles_per_panel", cycles_per_panel},
                     {"eps", eps}};
    return j.dump();
}

CharFnGrid CharFnGrid::from_json(const std::string& s) {
    auto j = nlohmann::json::parse(s);
    CharFnGrid g;
    g.rule = j.value("rule", g.rule);
    g.rho_max = j.value("rho_max", g.rho_max);
    g.t_max = j.value("t_max", g.t_max);
    g.n_rho = j.value("n_rho", g.n_rho);
    g.n_t = j.value("n_t", g.n_t);
    g.cycles_per_panel = j.value("cycles_per_panel", g.cycles_per_panel);
    g.eps = j.value("eps", g.eps);
    if (g.rule != "binomial" && g.rule != "bessel") throw ParameterError("grid rule must be binomial or bessel");
    if (!(g.cycles_per_panel > 0.0) || !(g.eps > 0.0)) throw ParameterError("grid: cycles_per_panel and eps must be > 0");
    return g;
}

std::uint64_t CharFnGrid::hash() const { return fnv1a64(to_json()); }

std::vector<InversionResult> Inverter::table(const std::vector<double>& zs, const std::vector<double>& us) const {
    std::vector<InversionResult> out(zs.size() * us.size());
    parallel_for(out.size(), [&](std::size_t k) { out[k] = at(zs[k / us.size()], us[k % us.size()]); });
    return out;
}

std::vector<InversionResult> Inverter::pairs(const std::vector<std::pair<double, double>>& zu) const {
    std::vector<InversionResult> out(zu.size());
    parallel_for(zu.size(), [&](std::size_t k) { out[k] = at(zu[k].first, zu[k].second); });
    return out;
}

InversionResult invert_radial(const GeneratingFunction& g, int N, double zmod, double u, const CharFnGrid& grid) {
    auto inv = make_inverter(g, N, grid, u, zmod);
    return inv->at(zmod, u);
}

double sphere_log_prefactor(int d, int N, double E, double z2) {
    double R2 = E - z2 / N;
    if (!(R2 > 0.0)) throw ParameterError("z_n: need E > |z|^2/N");
    return log_sphere_area(d * (N - 1)) + 0.5 * (d * (N - 1) - 2) * std::log(R2) - std::log(2.0) -
           0.5 * d * std::log(double(N));
}

LogNormalization z_n(const GeneratingFunction& g, int N, double E, const std::vector<double>& z,
                     const CharFnGrid& grid) {
    if (static_cast<int>(z.size()) != g.d()) throw ParameterError("z_n: momentum has wrong dimension");
    double z2 = 0.0;
    for (double x : z) z2 += x * x;
    double lp = sphere_log_prefactor(g.d(), N, E, z2);
    auto r = invert_radial(g, N, std::sqrt(z2), E, grid);
    if (!(r.raw > 0.0))
        throw NumericalError("z_n: inverted density is not positive (" + fmt_double(r.raw) +
                             "); refine the grid");
    return {std::log(r.raw) - lp, lp, r.raw, r.error_estimate, r.imag_residue};
}

double log_zn_gaussian(int d, int N, double a, double E) {
    return -0.5 * d * N * std::log(2.0 * pi * a) - E / (2.0 * a);
}

double z2_oracle(const GeneratingFunction& g, double E, const std::vector<double>& z, int nodes) {
    const int d = g.d();
    if (static_cast<int>(z.size()) != d) throw ParameterError("z2_oracle: momentum has wrong dimension");
    double z2 = 0.0;
    for (double x : z) z2 += x * x;
    double r2 = (E - 0.5 * z2) / 2.0;
    if (r2 < 0.0) throw ParameterError("z2_oracle: need E > |z|^2/2");
    double zm = std::sqrt(z2), r = std::sqrt(r2);
    auto term = [&](double c) {
        // v1 = z/2 + r w, cos(angle(w, z)) = c
        double a2 = 0.25 * z2 + r2 + r * zm * c;
        double b2 = 0.25 * z2 + r2 - r * zm * c;
        return g.log_pdf_r2(std::max(a2, 0.0)) + g.log_pdf_r2(std::max(b2, 0.0));
    };
    if (r2 == 0.0 || zm == 0.0) return term(0.0);
    if (d == 1) return std::log(0.5 * (std::exp(term(1.0)) + std::exp(term(-1.0))));
    // average over the polar angle with weight sin^{d-2}; trapezoid is spectral for this even periodic integrand
    double num = 0.0, den = 0.0, ref = term(1.0);
    for (int i = 0; i <= nodes; ++i) {
        double th = pi * i / nodes;
        double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
        w *= std::pow(std::sin(th), d - 2);
        num += w * std::exp(term(std::cos(th)) - ref);
        den += w;
    }
    return ref + std::log(num / den);
}

ScanLattice ScanLattice::standard(const GeneratingFunction& g, int N) {
    double s = std::sqrt(g.sigma_sq() * N);
    double m = N * g.second_moment();
    return {std::max(0.0, m - 6.0 * s), m + 6.0 * s, 81, 6.0 * std::sqrt(N * g.second_moment() / g.d()), 13};
}

ScanResult approx_error_scan(const GeneratingFunction& g, int N, const CharFnGrid& grid, const ScanLattice& lat) {
    double s = std::sqrt(g.sigma_sq() * N), m = N * g.second_moment();
    if (lat.u_lo > std::max(0.0, m - 6.0 * s) + 1e-9 || lat.u_hi < m + 6.0 * s - 1e-9 ||
        lat.v_hi < 6.0 * std::sqrt(N * g.second_moment() / g.d()) - 1e-9 || lat.n_u < 2 || lat.n_v < 2)
        throw ParameterError("approx_error_scan: lattice must cover N +- 6 Sigma sqrt(N) by [0, 6 sqrt(N/d)]");
    std::vector<double> us(lat.n_u), vs(lat.n_v);
    for (int i = 0; i < lat.n_u; ++i) us[i] = lat.u_lo + (lat.u_hi - lat.u_lo) * i / (lat.n_u - 1);
    for (int i = 0; i < lat.n_v; ++i) vs[i] = lat.v_hi * i / (lat.n_v - 1);
    auto inv = make_inverter(g, N, grid, lat.u_hi, lat.v_hi);
    auto tab = inv->table(vs, us);
    ScanResult best{-1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t iv = 0; iv < vs.size(); ++iv)
        for (std::size_t iu = 0; iu < us.size(); ++iu) {
            double h = tab[iv * us.size() + iu].raw;
            double gm = gamma_N_density(g, N, us[iu], vs[iv]);
            double e = std::abs(h - gm);
            if (e > best.sup_error) best = {e, 0.0, us[iu], vs[iv], h, gm};
        }
    best.scaled = std::sqrt(g.sigma_sq()) * std::pow(double(N), 0.5 * (g.d() + 1)) * best.sup_error;
    return best;
}

}  // namespace kaclab
