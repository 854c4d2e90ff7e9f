#include "kaclab/sphere.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

using std::numbers::pi;

BoltzmannSphereSpec::BoltzmannSphereSpec(int N_, int d_, double E_, std::vector<double> z_)
    : N(N_), d(d_), E(E_), z(std::move(z_)) {
    if (z.empty()) z.assign(d, 0.0);
    validate();
}

double BoltzmannSphereSpec::z2() const {
    double s = 0.0;
    for (double x : z) s += x * x;
    return s;
}

void BoltzmannSphereSpec::validate() const {
    if (N < 2) throw ParameterError("sphere: N must be >= 2");
    if (d < 1) throw ParameterError("sphere: d must be >= 1");
    if (static_cast<int>(z.size()) != d) throw ParameterError("sphere: momentum has wrong dimension");
    if (radius2() < 0.0) throw ParameterError("sphere: E < |z|^2/N, constraint set is empty");
}

Eigen::MatrixXd reduction_matrix(int N) {
    if (N < 2) throw ParameterError("reduction_matrix: N must be >= 2");
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
    for (int j = 1; j < N; ++j) {
        double s = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
        for (int i = 0; i < j; ++i) R(j - 1, i) = s;
        R(j - 1, j) = -j * s;
    }
    R.row(N - 1).setConstant(1.0 / std::sqrt(static_cast<double>(N)));
    return R;
}

double log_sphere_area(double m) {
    if (!(m >= 1.0)) throw ParameterError("log_sphere_area: m must be >= 1");
    return std::log(2.0) + 0.5 * m * std::log(pi) - std::lgamma(0.5 * m);
}

void uniform_sample(const BoltzmannSphereSpec& spec, Rng& rng, std::span<double> out) {
    const int N = spec.N, d = spec.d;
    const double R2 = spec.radius2();
    if (R2 <= 0.0) {
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < d; ++k) out[i * d + k] = spec.z[k] / N;
        return;
    }
    std::vector<double> mean(d);
    for (;;) {
        std::fill(mean.begin(), mean.end(), 0.0);
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < d; ++k) {
                out[i * d + k] = rng.normal();
                mean[k] += out[i * d + k];
            }
        for (auto& m : mean) m /= N;
        double ss = 0.0;
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < d; ++k) {
                out[i * d + k] -= mean[k];
                ss += out[i * d + k] * out[i * d + k];
            }
        if (ss < 1e-200) continue;  // all draws equal, resample
        double s = std::sqrt(R2 / ss);
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < d; ++k) out[i * d + k] = spec.z[k] / N + s * out[i * d + k];
        return;
    }
}

double fubini_log_prefactor(const BoltzmannSphereSpec& spec, int j) {
    const int N = spec.N, d = spec.d;
    return log_sphere_area(d * (N - j - 1)) - log_sphere_area(d * (N - 1)) + 0.5 * d * std::log(double(N) / (N - j)) -
           0.5 * (d * (N - 1) - 2) * std::log(spec.radius2());
}

double marginal_log_density(const BoltzmannSphereSpec& spec, int j, std::span<const double> vs) {
    const int N = spec.N, d = spec.d;
    if (j < 1 || j > N - 2) throw ParameterError("marginal_density: need 1 <= j <= N-2, got " + std::to_string(j));
    if (static_cast<int>(vs.size()) != j * d) throw ParameterError("marginal_density: wrong point size");
    double e = 0.0;
    std::vector<double> rest(spec.z);
    for (int i = 0; i < j; ++i)
        for (int k = 0; k < d; ++k) {
            double x = vs[i * d + k];
            e += x * x;
            rest[k] -= x;
        }
    double r2 = 0.0;
    for (double x : rest) r2 += x * x;
    double bracket = spec.E - e - r2 / (N - j);
    double expo = 0.5 * (d * (N - j - 1) - 2);
    if (bracket <= 0.0) {
        if (expo == 0.0 && bracket == 0.0) return fubini_log_prefactor(spec, j);
        return -INFINITY;
    }
    return fubini_log_prefactor(spec, j) + expo * std::log(bracket);
}

double marginal_density(const BoltzmannSphereSpec& spec, int j, std::span<const double> vs) {
    return std::exp(marginal_log_density(spec, j, vs));
}

double FubiniResult::combined_se() const { return std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se); }

namespace {
struct Acc {
    double n = 0, s = 0, s2 = 0;
    void add(double x) {
        n += 1;
        s += x;
        s2 += x * x;
    }
    double mean() const { return s / n; }
    double se() const {
        double m = mean();
        double var = std::max(0.0, s2 / n - m * m);
        return std::sqrt(var / std::max(1.0, n - 1));
    }
};
}  // namespace

FubiniResult fubini_check(const SphereFn& fn, const BoltzmannSphereSpec& spec, int j, int samples,
                          std::uint64_t seed) {
    spec.validate();
    const int N = spec.N, d = spec.d;
    if (j < 1 || j > N - 2) throw ParameterError("fubini_check: need 1 <= j <= N-2");
    if (samples < 2) throw ParameterError("fubini_check: need at least 2 samples");
    std::vector<double> v(N * d);

    Acc lhs;
    Rng r1 = Rng::derive(seed, 0);
    for (int s = 0; s < samples; ++s) {
        uniform_sample(spec, r1, v);
        lhs.add(fn(v));
    }

    // rhs: importance-sample the frozen block from a Gaussian around z/N,
    // weight by the marginal density, then fill the rest from the inner sphere.
    Acc rhs;
    Rng r2 = Rng::derive(seed, 1);
    double sp = 1.5 * std::sqrt(std::max(spec.radius2(), 1e-300) / (N * d));
    std::vector<double> y(j * d);
    for (int s = 0; s < samples; ++s) {
        double logq = 0.0;
        for (int i = 0; i < j; ++i)
            for (int k = 0; k < d; ++k) {
                double g = r2.normal();
                y[i * d + k] = spec.z[k] / N + sp * g;
                logq += -0.5 * g * g - std::log(sp) - 0.5 * std::log(2 * pi);
            }
        double lm = marginal_log_density(spec, j, y);
        if (!std::isfinite(lm)) {
            rhs.add(0.0);
            continue;
        }
        double w = std::exp(lm - logq);
        BoltzmannSphereSpec inner;
        inner.N = N - j;
        inner.d = d;
        inner.z = spec.z;
        double e = 0.0;
        for (int i = 0; i < j; ++i)
            for (int k = 0; k < d; ++k) {
                e += y[i * d + k] * y[i * d + k];
                inner.z[k] -= y[i * d + k];
            }
        inner.E = spec.E - e;
        if (inner.radius2() < 0.0) inner.E = inner.z2() / inner.N;  // boundary roundoff
        std::copy(y.begin(), y.end(), v.begin());
        uniform_sample(inner, r2, std::span<double>(v).subspan(j * d));
        rhs.add(w * fn(v));
    }
    return {lhs.mean(), lhs.se(), rhs.mean(), rhs.se()};
}

}  // namespace kaclab
