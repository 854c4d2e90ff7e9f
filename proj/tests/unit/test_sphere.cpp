#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kaclab/errors.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/sphere.hpp"

using namespace kaclab;
using std::numbers::pi;

TEST_CASE("sphere areas") {
    CHECK(std::exp(log_sphere_area(2)) == doctest::Approx(2 * pi));
    CHECK(std::exp(log_sphere_area(3)) == doctest::Approx(4 * pi));
    CHECK(std::exp(log_sphere_area(4)) == doctest::Approx(2 * pi * pi));
}

TEST_CASE("reduction matrix is orthogonal with the mean row last") {
    for (int N : {2, 3, 7, 20}) {
        auto A = reduction_matrix(N);
        auto I = Eigen::MatrixXd::Identity(N, N);
        CHECK((A * A.transpose() - I).norm() < 1e-13);
        for (int i = 0; i < N; ++i) CHECK(A(N - 1, i) == doctest::Approx(1.0 / std::sqrt(double(N))));
    }
}

TEST_CASE("uniform samples satisfy the constraints") {
    BoltzmannSphereSpec spec(9, 3, 12.0, {0.5, -1.0, 2.0});
    Rng rng(3);
    std::vector<double> v(27);
    for (int s = 0; s < 200; ++s) {
        uniform_sample(spec, rng, v);
        double e = 0.0;
        std::vector<double> z(3, 0.0);
        for (int i = 0; i < 9; ++i)
            for (int k = 0; k < 3; ++k) {
                e += v[i * 3 + k] * v[i * 3 + k];
                z[k] += v[i * 3 + k];
            }
        CHECK(e == doctest::Approx(12.0).epsilon(1e-12));
        for (int k = 0; k < 3; ++k) CHECK(z[k] == doctest::Approx(spec.z[k]).epsilon(1e-12));
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(BoltzmannSphereSpec(4, 2, 1.0, {3.0, 0.0}), ParameterError);
    CHECK_THROWS_AS(BoltzmannSphereSpec(1, 2, 1.0), ParameterError);
}

TEST_CASE("one-particle marginal integrates to one") {
    for (int N : {4, 6, 16}) {
        BoltzmannSphereSpec spec(N, 2, double(N));
        double rmax = std::sqrt(N * (N - 1.0) / N);
        auto q = integrate(
            [&](double r) {
                std::vector<double> x{r, 0.0};
                return 2 * pi * r * marginal_density(spec, 1, x);
            },
            0.0, rmax, 1e-13);
        CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
    }
    BoltzmannSphereSpec spec(4, 2, 4.0);
    std::vector<double> x(2, 0.0);
    CHECK_THROWS_AS(marginal_density(spec, 3, std::vector<double>(6, 0.0)), ParameterError);
    CHECK(std::isfinite(marginal_log_density(spec, 1, x)));
}

TEST_CASE("Fubini sides agree on a small sphere") {
    BoltzmannSphereSpec spec(5, 2, 5.0);
    auto fn = [](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1]; };
    auto r = fubini_check(fn, spec, 2, 40000, 5);
    CHECK(std::abs(r.lhs - r.rhs) < 4 * r.combined_se());
    // exchangeability: E|v1|^2 = E/N
    CHECK(std::abs(r.lhs - 1.0) < 5 * r.lhs_se);
}
