#pragma once
#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "kaclab/rng.hpp"

namespace kaclab {

struct BoltzmannSphereSpec {
    int N = 2;
    int d = 2;
    double E = 2.0;
    std::vector<double> z;  // size d; empty means zero momentum

    BoltzmannSphereSpec() = default;
    BoltzmannSphereSpec(int N_, int d_, double E_, std::vector<double> z_ = {});

    double z2() const;
    // E - |z|^2/N, the squared radius inside the hyperplane
    double radius2() const { return E - z2() / N; }
    void validate() const;  // throws ParameterError
};

Eigen::MatrixXd reduction_matrix(int N);

// log |S^{m-1}|, the surface area of the unit sphere in R^m
double log_sphere_area(double m);

// N*d values, row-major by particle. Uniform on the sphere.
void uniform_sample(const BoltzmannSphereSpec& spec, Rng& rng, std::span<double> out);

// Density of (v_1..v_j) under the uniform sphere measure. vs holds j*d values.
double marginal_log_density(const BoltzmannSphereSpec& spec, int j, std::span<const double> vs);
double marginal_density(const BoltzmannSphereSpec& spec, int j, std::span<const double> vs);
// The log prefactor that multiplies bracket^{(d(N-j-1)-2)/2}
double fubini_log_prefactor(const BoltzmannSphereSpec& spec, int j);

using SphereFn = std::function<double(std::span<const double>)>;  // takes N*d values

struct FubiniResult {
    double lhs, lhs_se, rhs, rhs_se;
    double combined_se() const;
};

FubiniResult fubini_check(const SphereFn& fn, const BoltzmannSphereSpec& spec, int j, int samples,
                          std::uint64_t seed);

}  // namespace kaclab
