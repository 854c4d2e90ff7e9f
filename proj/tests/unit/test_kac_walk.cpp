#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kaclab/errors.hpp"
#include "kaclab/kac_walk.hpp"

using namespace kaclab;

TEST_CASE("collision map") {
    Rng rng(1);
    std::vector<double> a(3), b(3), om(3);
    for (int i = 0; i < 10000; ++i) {
        for (auto& x : a) x = 3 * rng.normal();
        for (auto& x : b) x = rng.normal();
        rng.unit_vector(om);
        double e = 0, p[3];
        for (int k = 0; k < 3; ++k) {
            e += a[k] * a[k] + b[k] * b[k];
            p[k] = a[k] + b[k];
        }
        collide(a, b, om);
        double e2 = 0;
        for (int k = 0; k < 3; ++k) {
            e2 += a[k] * a[k] + b[k] * b[k];
            CHECK(std::abs(a[k] + b[k] - p[k]) <= 1e-12 * (1 + std::abs(p[k])));
        }
        CHECK(std::abs(e2 - e) <= 1e-12 * e);
    }
    std::vector<double> u{1.0, 2.0}, w{1.0, 2.0}, o2{0.6, 0.8};
    collide(u, w, o2);
    CHECK(u[0] == 1.0);
    CHECK(w[1] == 2.0);
    std::vector<double> x{3.0, 1.0}, y{1.0, 1.0}, dir{1.0, 0.0};
    collide(x, y, dir);
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(y[0] == doctest::Approx(1.0));
}

TEST_CASE("steps conserve, clocks and pairs are uniform") {
    auto sys = ParticleSystem::single_hot(64, 2, 64.0);
    CHECK(sys.energy() == doctest::Approx(64.0));
    CHECK(std::abs(sys.momentum()[0]) < 1e-12);
    Rng rng(2);
    const int K = 100000;
    std::vector<long long> hits(64 * 63 / 2, 0);
    for (int k = 0; k < K; ++k) {
        auto ev = step(sys, rng);
        CHECK_LT(ev.i, ev.j);
        hits[ev.i * 64 - ev.i * (ev.i + 1) / 2 + (ev.j - ev.i - 1)]++;
    }
    CHECK(sys.drift() <= 1e-9);
    // time after K steps ~ K/N with sd sqrt(K)/N
    CHECK(std::abs(sys.time - K / 64.0) < 3 * std::sqrt(double(K)) / 64.0);
    double expct = double(K) / hits.size(), chi2 = 0;
    for (auto h : hits) chi2 += (h - expct) * (h - expct) / expct;
    // 2015 degrees of freedom; 95% point is about 2120
    CHECK(chi2 < 2120.0);
}

TEST_CASE("thinning kernels") {
    std::vector<double> a{1.0, 0.0}, b{1.0, 0.0};
    CHECK(kernel_value(KernelKind::relative_speed, 1.0, a, b) == 0.0);
    CHECK(kernel_value(KernelKind::relative_speed, 0.0, a, b) == 1.0);
    CHECK(kernel_bound(KernelKind::energy_form, 0.0, 10.0) == 1.0);
    CHECK_THROWS_AS(kernel_bound(KernelKind::energy_form, -1.0, 10.0), ParameterError);
    CHECK_THROWS_AS(parse_kernel("hard_spheres"), ParameterError);

    auto sys = ParticleSystem::single_hot(16, 2, 16.0);
    Rng rng(4);
    for (int i = 0; i < 5000; ++i) {
        auto o = kernel_thinning_step(sys, 1.0, KernelKind::relative_speed, rng);
        CHECK(o.acceptance_probability >= 0.0);
        CHECK(o.acceptance_probability <= 1.0);
    }
    CHECK(sys.drift() < 1e-10);
    // gamma = 0 accepts everything, so it is the plain walk
    auto s1 = ParticleSystem::single_hot(16, 2, 16.0);
    Rng r1(9);
    for (int i = 0; i < 100; ++i) CHECK(kernel_thinning_step(s1, 0.0, KernelKind::energy_form, r1).accepted);
}

TEST_CASE("runs: determinism, constant observable, relaxation") {
    auto init = ParticleSystem::single_hot(32, 2, 32.0);
    std::vector<Observable> obs{named_observable("one"), named_observable("mean_quartic")};
    std::vector<double> ts{0, 1, 2, 4, 8, 16};
    auto a = run_replicas(init, 4, 16.0, ts, obs, 77);
    auto b = run_replicas(init, 4, 16.0, ts, obs, 77);
    REQUIRE(a.times.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(a.values[i][0] == 1.0);
        CHECK(a.values[i][1] == b.values[i][1]);
    }
    // quartic moment falls from the single-hot value toward equilibrium
    double eq = quartic_marginal_oracle(BoltzmannSphereSpec(32, 2, 32.0));
    CHECK(a.values[0][1] > 10 * eq);
    CHECK(std::abs(a.values.back()[1] - eq) < 0.5 * eq);
    CHECK_THROWS_AS(named_observable("entropy"), ParameterError);
}

TEST_CASE("equilibrium quartic moment and its oracle") {
    BoltzmannSphereSpec spec(64, 2, 64.0);
    double m = 2 * 63.0;
    // uniform direction in R^{d(N-1)}: E|block|^4 = R^4 d(d+2)/(m(m+2)), scaled by ((N-1)/N)^2
    double closed = std::pow(63.0 / 64.0, 2) * 64 * 64 * 8 / (m * (m + 2));
    CHECK(quartic_marginal_oracle(spec) == doctest::Approx(closed).epsilon(1e-10));
    auto q = quartic_equilibrium(64, 2, 64 * 200, 10000, 64, 3);
    CHECK(std::abs(q.z_score) < 3.0);
}

TEST_CASE("initial conditions") {
    auto s = ParticleSystem::from_json(R"({"velocities": [[1, 0], [-1, 0], [0, 2]]})");
    CHECK(s.N == 3);
    CHECK(s.energy() == doctest::Approx(6.0));
    CHECK_THROWS_AS(ParticleSystem::from_json("[[1,2],[3]]"), ParameterError);
    CHECK_THROWS_AS(ParticleSystem::from_json("nope"), ParameterError);
    Rng rng(1);
    auto u = ParticleSystem::uniform(BoltzmannSphereSpec(10, 3, 10.0), rng);
    CHECK(u.energy() == doctest::Approx(10.0));
}
