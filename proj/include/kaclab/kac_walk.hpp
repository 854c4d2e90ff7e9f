#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kaclab/rng.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

// In place: (vi, vj) -> (c + |vi - vj|/2 omega, c - |vi - vj|/2 omega), c the midpoint.
void collide(std::span<double> vi, std::span<double> vj, std::span<const double> omega);

struct ParticleSystem {
    int N = 0, d = 0;
    std::vector<double> v;  // N*d, row-major by particle
    double time = 0.0;
    double E0 = 0.0;
    std::vector<double> z0;

    ParticleSystem() = default;
    ParticleSystem(int N, int d, std::vector<double> velocities);

    std::span<double> particle(int i) { return {v.data() + std::size_t(i) * d, std::size_t(d)}; }
    std::span<const double> particle(int i) const { return {v.data() + std::size_t(i) * d, std::size_t(d)}; }
    double energy() const;
    std::vector<double> momentum() const;
    // max of relative energy drift and momentum drift scaled by sqrt(E0)
    double drift() const;

    static ParticleSystem uniform(const BoltzmannSphereSpec& spec, Rng& rng);
    // zero momentum, a fraction (N-1)/N of the energy on particle 0
    static ParticleSystem single_hot(int N, int d, double E);
    static ParticleSystem from_json(const std::string& text);
};

struct CollisionEvent {
    int i, j;
    std::vector<double> omega;
    double jump_time;
};

// Exp(N) clock, uniform pair i < j, uniform omega. continuous = false advances time by exactly 1/N.
CollisionEvent step(ParticleSystem& sys, Rng& rng, bool continuous = true);

enum class KernelKind { energy_form, relative_speed };
KernelKind parse_kernel(const std::string& s);
double kernel_value(KernelKind kind, double gamma, std::span<const double> vi, std::span<const double> vj);
double kernel_bound(KernelKind kind, double gamma, double E);

struct ThinningOutcome {
    CollisionEvent proposal;
    bool accepted;
    double acceptance_probability;
};
// Proposals at rate N * B_max, accepted with probability B / B_max.
ThinningOutcome kernel_thinning_step(ParticleSystem& sys, double gamma, KernelKind kind, Rng& rng);

struct Observable {
    std::string name;
    std::function<double(const ParticleSystem&)> fn;
};
Observable named_observable(const std::string& name);  // one, v1_sq, v1_quartic, mean_quartic, energy, momentum

struct Series {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // [time][observable]
    std::vector<std::vector<double>> se;      // filled by run_replicas
    long long collisions = 0, proposals = 0;
    double max_drift = 0.0;
};

struct RunOptions {
    double gamma = 0.0;
    std::string kernel;  // empty = plain Maxwell molecules
    bool continuous = true;
};

Series run(ParticleSystem& sys, double t_end, const std::vector<double>& sample_times,
           const std::vector<Observable>& obs, Rng& rng, const RunOptions& opt = {});

Series run_replicas(const ParticleSystem& init, int replicas, double t_end, const std::vector<double>& sample_times,
                    const std::vector<Observable>& obs, std::uint64_t seed, const RunOptions& opt = {});

struct EquilibriumCheck {
    double mean, se, oracle;
    double z_score;
    long long samples;
};
// E|v_1|^4 from a single trajectory after burn-in, sampled every `thin` collisions; SE by batch means
EquilibriumCheck quartic_equilibrium(int N, int d, long long burn_in, long long samples, int thin, std::uint64_t seed);
// E|v_1|^4 under the uniform sphere measure by radial quadrature of the one-particle marginal
double quartic_marginal_oracle(const BoltzmannSphereSpec& spec);

}  // namespace kaclab
