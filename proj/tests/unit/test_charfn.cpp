#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kaclab/charfn.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/sphere.hpp"

using namespace kaclab;
using std::numbers::pi;

namespace {

// int M_a(x) e^{-2 pi i (q x + t x^2)} dx on a wide GL grid
cplx gauss1d(double a, double q, double t) {
    double s = std::sqrt(a);
    NodeSet ns = gl_panels(-14 * s, 14 * s, 400);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double x = ns.x[i];
        acc += ns.w[i] * std::exp(-x * x / (2 * a)) / std::sqrt(2 * pi * a) *
               std::exp(cplx(0.0, -2 * pi * (q * x + t * x * x)));
    }
    return acc;
}

// transform of M_a in d = 2 with p along the first axis
cplx oracle_single(double a, double rho, double t) { return gauss1d(a, rho, t) * gauss1d(a, 0.0, t); }

}  // namespace

TEST_CASE("single transform: origin, modulus, quadrature") {
    CHECK(std::abs(h_hat_single(0.3, 2, 0.0, 0.0) - 1.0) < 1e-15);
    for (double t : {-2.0, 0.1, 5.0}) {
        double m = std::pow(1 + 16 * pi * pi * 0.3 * 0.3 * t * t, -0.25 * 3);
        CHECK(std::abs(h_hat_single(0.3, 3, 0.0, t)) == doctest::Approx(m).epsilon(1e-13));
    }
    CHECK(std::abs(h_hat_single(0.25, 2, 1.0, 0.3) - oracle_single(0.25, 1.0, 0.3)) < 1e-6);
}

TEST_CASE("mixture transform against quadrature") {
    GeneratingFunction g(2, 0.1);
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        double rho = 1.5 * rng.uniform(), t = 2.0 * rng.uniform() - 1.0;
        cplx q = 0.0;
        for (auto& c : g.components()) q += c.weight * oracle_single(c.a, rho, t);
        CHECK(std::abs(h_hat(g, rho, t) - q) < 1e-6);
    }
}

TEST_CASE("moduli bounded by one, conjugate symmetry") {
    GeneratingFunction g(3, 0.07);
    Rng rng(5);
    for (int i = 0; i < 100000; ++i) {
        double rho = 10 * rng.uniform(), t = 40 * (rng.uniform() - 0.5);
        CHECK_LE(std::abs(h_hat(g, rho, t)), 1.0 + 1e-15);
        CHECK_LE(std::abs(gamma1_hat(g, rho, t)), 1.0 + 1e-15);
        if (i % 100 == 0) {
            // radial transform, so p -> -p is invisible; only t flips
            CHECK(std::abs(h_hat(g, rho, -t) - std::conj(h_hat(g, rho, t))) < 1e-15);
            CHECK(std::abs(gamma1_hat(g, rho, -t)) == doctest::Approx(std::abs(gamma1_hat(g, rho, t))));
        }
    }
    CHECK(std::abs(h_hat(g, 0.0, 0.0) - 1.0) < 1e-15);
    CHECK(std::abs(gamma1_hat(g, 0.0, 0.0) - 1.0) < 1e-15);
    // branch continuity of the power across t = 0
    CHECK(std::abs(h_hat_single(0.4, 3, 0.2, 1e-9) - h_hat_single(0.4, 3, 0.2, -1e-9)) < 1e-7);
}

TEST_CASE("gamma1 power is the transform of gamma_N") {
    GeneratingFunction g(2, 0.25);
    const int N = 4;
    double s2 = g.sigma_sq(), sv = std::sqrt(double(N) / 2), su = std::sqrt(N * s2);
    NodeSet vu = gl_panels(-12 * sv, 12 * sv, 200), uu = gl_panels(N - 12 * su, N + 12 * su, 200);
    for (auto [rho, t] : {std::pair{0.3, 0.1}, std::pair{0.1, -0.4}}) {
        // factorizes: two v coordinates (p along the first) and u
        cplx fx = 0.0, fy = 0.0, fu = 0.0;
        for (std::size_t i = 0; i < vu.size(); ++i) {
            double x = vu.x[i], gx = std::exp(-x * x / (2 * sv * sv)) / std::sqrt(2 * pi * sv * sv);
            fx += vu.w[i] * gx * std::exp(cplx(0, -2 * pi * rho * x));
            fy += vu.w[i] * gx;
        }
        for (std::size_t i = 0; i < uu.size(); ++i) {
            double u = uu.x[i];
            fu += uu.w[i] * std::exp(-(u - N) * (u - N) / (2 * su * su)) / std::sqrt(2 * pi * su * su) *
                  std::exp(cplx(0, -2 * pi * t * u));
        }
        CHECK(std::abs(gamma1_hat_pow(g, N, rho, t) - fx * fy * fu) < 1e-6);
    }
}

TEST_CASE("gamma_N: normalization, peak, pinned value") {
    GeneratingFunction g(2, 0.25);
    const int N = 100;
    // pinned at build time: d / (Sigma N^{3/2} (2 pi)^{3/2}) with Sigma^2 = 5/3
    CHECK(gamma_N_density(g, N, 100.0, 0.0) == doctest::Approx(9.8363917825388764e-05).epsilon(1e-14));
    CHECK(gamma_N_density(g, N, 100.0, 0.0) > gamma_N_density(g, N, 100.5, 0.0));
    CHECK(gamma_N_density(g, N, 100.0, 0.0) > gamma_N_density(g, N, 100.0, 0.1));
    CHECK(gamma_N_density(g, N, 99.5, 0.0) == doctest::Approx(gamma_N_density(g, N, 100.5, 0.0)));
    // lattice integral over (u, |v|)
    double su = std::sqrt(N * g.sigma_sq()), sv = std::sqrt(N / 2.0);
    NodeSet uu = gl_panels(N - 12 * su, N + 12 * su, 60), rr = gl_panels(0, 12 * sv, 60);
    double s = 0.0;
    for (std::size_t i = 0; i < uu.size(); ++i)
        for (std::size_t j = 0; j < rr.size(); ++j)
            s += uu.w[i] * rr.w[j] * 2 * pi * rr.x[j] * gamma_N_density(g, N, uu.x[i], rr.x[j]);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Gaussian oracle: inversion reproduces the closed form") {
    const double a = 0.25;
    auto g = GeneratingFunction::single(2, a);
    for (int N : {4, 8, 16, 32}) {
        auto r = z_n(g, N, double(N), {0.0, 0.0});
        CHECK(r.log_zn == doctest::Approx(log_zn_gaussian(2, N, a, N)).epsilon(1e-9));
    }
    // the density itself at (d, N, a) = (2, 8, 0.25)
    const int N = 8;
    double u = 8.0;
    double expect = std::exp(log_sphere_area(2 * (N - 1)) + 0.5 * (2 * (N - 1) - 2) * std::log(u) - std::log(2.0 * N) -
                             N * std::log(2 * pi * a) - u / (2 * a));
    CHECK(invert_radial(g, N, 0.0, u).value == doctest::Approx(expect).epsilon(1e-9));
    // off-centre momentum, same closed form
    auto r = z_n(g, N, 10.0, {1.0, -2.0});
    CHECK(r.log_zn == doctest::Approx(log_zn_gaussian(2, N, a, 10.0)).epsilon(1e-9));
}

TEST_CASE("box inverter near the support edge at intermediate |z|") {
    const int N = 128;
    GeneratingFunction g(2, delta_schedule(N, (0.5 + 5.0 / 9.0) / 2));
    auto inv = make_inverter(g, N, {}, 272.0, 48.0);
    for (auto [z, u] : {std::pair{20.0, 3.4}, std::pair{10.0, 1.0}, std::pair{35.0, 10.0}}) {
        double direct = invert_radial(g, N, z, u).value;
        CHECK(std::abs(inv->at(z, u).raw - direct) < 1e-8 * gamma_N_density(g, N, N * g.second_moment(), 0.0));
    }
}

TEST_CASE("outside the support the density vanishes") {
    GeneratingFunction g(2, 0.2);
    auto r = invert_radial(g, 8, 3.0, 0.5);
    CHECK(r.value == 0.0);
    CHECK_THROWS_AS(z_n(g, 8, 1.0, {3.0, 0.0}), ParameterError);
}

TEST_CASE("N = 2 oracle") {
    auto gs = GeneratingFunction::single(2, 0.3);
    CHECK(z2_oracle(gs, 1.7, {0.4, 0.1}) == doctest::Approx(-2 * std::log(2 * pi * 0.3) - 1.7 / 0.6).epsilon(1e-12));
    GeneratingFunction g(2, 0.2);
    CHECK(z2_oracle(g, 2.0, {0.0, 0.0}) == doctest::Approx(-4.6186232989802374).epsilon(1e-13));
    CHECK(z2_oracle(g, 3.0, {0.5, -0.2}) == doctest::Approx(z2_oracle(g, 3.0, {-0.5, 0.2})).epsilon(1e-13));
    for (double dl : {0.1, 0.2, 0.3}) {
        GeneratingFunction gm(2, dl);
        for (auto [E, z] : {std::pair{2.0, std::vector<double>{0.0, 0.0}}, std::pair{3.0, std::vector<double>{0.5, 0.0}},
                            std::pair{1.2, std::vector<double>{0.3, 0.9}}}) {
            CHECK(z_n(gm, 2, E, z).log_zn == doctest::Approx(z2_oracle(gm, E, z)).epsilon(1e-9));
        }
    }
    GeneratingFunction g3(3, 0.15);
    CHECK(z_n(g3, 2, 2.5, {0.2, 0.1, -0.3}).log_zn ==
          doctest::Approx(z2_oracle(g3, 2.5, {0.2, 0.1, -0.3})).epsilon(1e-9));
}

TEST_CASE("radial Bessel rule agrees with the binomial rule") {
    GeneratingFunction g(2, 0.2);
    CharFnGrid bessel;
    bessel.rule = "bessel";
    auto inv_b = make_inverter(g, 16, bessel, 16.0, 1.0);
    auto inv_c = make_inverter(g, 16, {}, 16.0, 1.0);
    for (auto [z, u] : {std::pair{0.0, 16.0}, std::pair{0.7, 15.0}, std::pair{0.3, 18.0}}) {
        auto b = inv_b->at(z, u), c = inv_c->at(z, u);
        CHECK(b.value == doctest::Approx(c.value).epsilon(1e-8));
        CHECK(b.imag_residue < 1e-9);
    }
    CHECK_THROWS_AS(make_inverter(GeneratingFunction(4, 0.2), 16, bessel, 16.0, 1.0), ParameterError);
    CHECK_THROWS_AS(make_inverter(g, 2, bessel, 2.0, 1.0), ParameterError);
}

TEST_CASE("mixture inversion equals the binomial expansion at N = 2") {
    // h^{*2} = sum over component pairs of the two-Maxwellian convolutions
    GeneratingFunction g(2, 0.3);
    auto& cs = g.components();
    double u = 2.4, z = 0.6;
    double direct = invert_radial(g, 2, z, u).value, expand = 0.0;
    for (auto& c1 : cs)
        for (auto& c2 : cs) {
            // density of (V1 + V2, |V1|^2 + |V2|^2) by quadrature over the circle
            double R2 = u - z * z / 2, r = std::sqrt(R2 / 2);
            NodeSet th = gl_panels(0, 2 * pi, 32);
            double s = 0.0;
            for (std::size_t i = 0; i < th.size(); ++i) {
                double x1 = z / 2 + r * std::cos(th.x[i]), y1 = r * std::sin(th.x[i]);
                double x2 = z - x1, y2 = -y1;
                s += th.w[i] * std::exp(maxwellian_log_pdf_r2(x1 * x1 + y1 * y1, 2, c1.a) +
                                        maxwellian_log_pdf_r2(x2 * x2 + y2 * y2, 2, c2.a));
            }
            // Z_2 from the circle average, then back to h via the geometric factor
            double avg = s / (2 * pi);
            expand += c1.weight * c2.weight * avg * std::exp(sphere_log_prefactor(2, 2, u, z * z));
        }
    CHECK(direct == doctest::Approx(expand).epsilon(1e-9));
}

TEST_CASE("grid config round trip") {
    CharFnGrid gr;
    gr.rule = "bessel";
    gr.n_t = 12;
    gr.eps = 1e-8;
    auto back = CharFnGrid::from_json(gr.to_json());
    CHECK(back.rule == "bessel");
    CHECK(back.n_t == 12);
    CHECK(back.hash() == gr.hash());
    CHECK(CharFnGrid{}.hash() != gr.hash());
}

TEST_CASE("sup-error scan") {
    GeneratingFunction g(2, 0.1);
    auto lat = ScanLattice::standard(g, 64);
    auto bad = lat;
    bad.u_hi -= 1.0;
    CHECK_THROWS_AS(approx_error_scan(g, 64, {}, bad), ParameterError);
    auto rm = approx_error_scan(g, 64, {}, lat);
    CHECK(rm.scaled == doctest::Approx(rm.sup_error * std::sqrt(g.sigma_sq()) * std::pow(64.0, 1.5)));
    // relative to its own peak height, the matched single Maxwellian is closer to its Gaussian
    auto gs = GeneratingFunction::single(2, 0.25);
    auto rs = approx_error_scan(gs, 64, {}, ScanLattice::standard(gs, 64));
    CHECK(rs.scaled < rm.scaled);
    // far outside the lattice both sides are negligible
    CHECK(gamma_N_log_density(g, 64, 5000.0, 0.0) < std::log(1e-300));
}
