#include "kaclab/kac_walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"

namespace kaclab {

void collide(std::span<double> vi, std::span<double> vj, std::span<const double> omega) {
    const std::size_t d = vi.size();
    // scaled norm, safe for huge and tiny components
    double mx = 0.0;
    for (std::size_t k = 0; k < d; ++k) mx = std::max(mx, std::abs(vi[k] - vj[k]));
    double rel = 0.0;
    if (mx > 0.0) {
        for (std::size_t k = 0; k < d; ++k) {
            double q = (vi[k] - vj[k]) / mx;
            rel += q * q;
        }
        rel = mx * std::sqrt(rel);
    }
    for (std::size_t k = 0; k < d; ++k) {
        double c = 0.5 * (vi[k] + vj[k]);
        vi[k] = c + 0.5 * rel * omega[k];
        vj[k] = c - 0.5 * rel * omega[k];
    }
}

ParticleSystem::ParticleSystem(int N_, int d_, std::vector<double> velocities)
    : N(N_), d(d_), v(std::move(velocities)) {
    if (N < 2 || d < 1) throw ParameterError("particle system needs N >= 2, d >= 1");
    if (static_cast<int>(v.size()) != N * d) throw ParameterError("particle system: expected N*d velocity values");
    E0 = energy();
    z0 = momentum();
}

double ParticleSystem::energy() const {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

std::vector<double> ParticleSystem::momentum() const {
    std::vector<double> z(d, 0.0);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < d; ++k) z[k] += v[std::size_t(i) * d + k];
    return z;
}

double ParticleSystem::drift() const {
    double de = std::abs(energy() - E0) / E0;
    auto z = momentum();
    double dz = 0.0;
    for (int k = 0; k < d; ++k) dz = std::max(dz, std::abs(z[k] - z0[k]));
    return std::max(de, dz / std::sqrt(E0));
}

ParticleSystem ParticleSystem::uniform(const BoltzmannSphereSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<double> v(std::size_t(spec.N) * spec.d);
    uniform_sample(spec, rng, v);
    return ParticleSystem(spec.N, spec.d, std::move(v));
}

ParticleSystem ParticleSystem::single_hot(int N, int d, double E) {
    if (N < 2 || d < 1 || !(E > 0.0)) throw ParameterError("single_hot: need N >= 2, d >= 1, E > 0");
    double c = std::sqrt(E / (double(N) * (N - 1)));
    std::vector<double> v(std::size_t(N) * d, 0.0);
    v[0] = c * (N - 1);
    for (int i = 1; i < N; ++i) v[std::size_t(i) * d] = -c;
    return ParticleSystem(N, d, std::move(v));
}

ParticleSystem ParticleSystem::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ParameterError(std::string("initial condition: bad JSON: ") + e.what());
    }
    const auto& vel = j.contains("velocities") ? j["velocities"] : j;
    if (!vel.is_array() || vel.empty()) throw ParameterError("initial condition: expected an array of velocities");
    int N = static_cast<int>(vel.size());
    int d = static_cast<int>(vel[0].size());
    std::vector<double> v;
    for (const auto& p : vel) {
        if (!p.is_array() || static_cast<int>(p.size()) != d)
            throw ParameterError("initial condition: velocities must all have the same dimension");
        for (const auto& x : p) v.push_back(x.get<double>());
    }
    return ParticleSystem(N, d, std::move(v));
}

namespace {

CollisionEvent propose(ParticleSystem& sys, Rng& rng, double rate, bool continuous) {
    CollisionEvent ev;
    ev.jump_time = continuous ? rng.exponential(rate) : 1.0 / rate;
    const auto n = static_cast<std::uint64_t>(sys.N);
    auto a = static_cast<int>(rng.below(n));
    auto b = static_cast<int>(rng.below(n - 1));
    if (b >= a) ++b;
    ev.i = std::min(a, b);
    ev.j = std::max(a, b);
    ev.omega.resize(sys.d);
    rng.unit_vector(ev.omega);
    return ev;
}

}  // namespace

CollisionEvent step(ParticleSystem& sys, Rng& rng, bool continuous) {
    auto ev = propose(sys, rng, double(sys.N), continuous);
    collide(sys.particle(ev.i), sys.particle(ev.j), ev.omega);
    sys.time += ev.jump_time;
    return ev;
}

KernelKind parse_kernel(const std::string& s) {
    if (s == "energy_form") return KernelKind::energy_form;
    if (s == "relative_speed") return KernelKind::relative_speed;
    throw ParameterError("unknown kernel '" + s + "' (energy_form | relative_speed)");
}

double kernel_value(KernelKind kind, double gamma, std::span<const double> vi, std::span<const double> vj) {
    if (gamma == 0.0) return 1.0;  // 0^0 = 1
    double s = 0.0;
    for (std::size_t k = 0; k < vi.size(); ++k)
        s += kind == KernelKind::energy_form ? vi[k] * vi[k] + vj[k] * vj[k] : (vi[k] - vj[k]) * (vi[k] - vj[k]);
    return kind == KernelKind::energy_form ? std::pow(1.0 + s, 0.5 * gamma) : std::pow(s, 0.5 * gamma);
}

double kernel_bound(KernelKind kind, double gamma, double E) {
    if (!(gamma >= 0.0)) throw ParameterError("kernel: gamma must be >= 0");
    double b = kind == KernelKind::energy_form ? std::pow(1.0 + E, 0.5 * gamma) : std::pow(2.0 * E, 0.5 * gamma);
    if (!std::isfinite(b) || !(b > 0.0)) throw ParameterError("kernel: bound is not finite for this gamma");
    return b;
}

ThinningOutcome kernel_thinning_step(ParticleSystem& sys, double gamma, KernelKind kind, Rng& rng) {
    double bmax = kernel_bound(kind, gamma, sys.E0);
    ThinningOutcome out{propose(sys, rng, sys.N * bmax, true), false, 0.0};
    double b = kernel_value(kind, gamma, sys.particle(out.proposal.i), sys.particle(out.proposal.j));
    out.acceptance_probability = std::min(1.0, b / bmax);
    sys.time += out.proposal.jump_time;
    if (out.acceptance_probability >= 1.0 || rng.uniform() < out.acceptance_probability) {
        out.accepted = true;
        collide(sys.particle(out.proposal.i), sys.particle(out.proposal.j), out.proposal.omega);
    }
    return out;
}

Observable named_observable(const std::string& name) {
    auto sq = [](std::span<const double> x) {
        double s = 0.0;
        for (double y : x) s += y * y;
        return s;
    };
    if (name == "one") return {name, [](const ParticleSystem&) { return 1.0; }};
    if (name == "v1_sq") return {name, [sq](const ParticleSystem& s) { return sq(s.particle(0)); }};
    if (name == "v1_quartic")
        return {name, [sq](const ParticleSystem& s) {
                    double r = sq(s.particle(0));
                    return r * r;
                }};
    if (name == "mean_quartic")
        return {name, [sq](const ParticleSystem& s) {
                    double m = 0.0;
                    for (int i = 0; i < s.N; ++i) {
                        double r = sq(s.particle(i));
                        m += r * r;
                    }
                    return m / s.N;
                }};
    if (name == "energy") return {name, [](const ParticleSystem& s) { return s.energy(); }};
    if (name == "momentum")
        return {name, [](const ParticleSystem& s) {
                    auto z = s.momentum();
                    double m = 0.0;
                    for (double x : z) m += x * x;
                    return std::sqrt(m);
                }};
    throw ParameterError("unknown observable '" + name + "'");
}

Series run(ParticleSystem& sys, double t_end, const std::vector<double>& sample_times,
           const std::vector<Observable>& obs, Rng& rng, const RunOptions& opt) {
    if (!(t_end > 0.0)) throw ParameterError("run: t_end must be positive");
    Series s;
    for (auto& o : obs) s.names.push_back(o.name);
    std::vector<double> ts(sample_times);
    std::sort(ts.begin(), ts.end());
    bool thin = !opt.kernel.empty();
    KernelKind kind = thin ? parse_kernel(opt.kernel) : KernelKind::energy_form;
    auto record = [&](double t) {
        s.times.push_back(t);
        std::vector<double> row;
        for (auto& o : obs) row.push_back(o.fn(sys));
        s.values.push_back(std::move(row));
    };
    const double rate = sys.N * (thin ? kernel_bound(kind, opt.gamma, sys.E0) : 1.0);
    std::size_t next = 0;
    while (true) {
        auto ev = propose(sys, rng, rate, opt.continuous || thin);
        double t_next = sys.time + ev.jump_time;
        // the state is piecewise constant between jumps
        while (next < ts.size() && ts[next] < t_next && ts[next] <= t_end) record(ts[next++]);
        if (t_next > t_end) break;
        ++s.proposals;
        bool accept = true;
        if (thin) {
            double b = kernel_value(kind, opt.gamma, sys.particle(ev.i), sys.particle(ev.j)) / rate * sys.N;
            accept = b >= 1.0 || rng.uniform() < b;
        }
        if (accept) {
            collide(sys.particle(ev.i), sys.particle(ev.j), ev.omega);
            ++s.collisions;
        }
        sys.time = t_next;
        s.max_drift = std::max(s.max_drift, sys.drift());
    }
    return s;
}

Series run_replicas(const ParticleSystem& init, int replicas, double t_end, const std::vector<double>& sample_times,
                    const std::vector<Observable>& obs, std::uint64_t seed, const RunOptions& opt) {
    if (replicas < 1) throw ParameterError("run: need at least one replica");
    std::vector<Series> all(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        ParticleSystem sys = init;
        Rng rng = Rng::derive(seed, r);
        all[r] = run(sys, t_end, sample_times, obs, rng, opt);
    });
    Series out = all[0];
    const std::size_t nt = out.times.size(), no = obs.size();
    out.se.assign(nt, std::vector<double>(no, 0.0));
    for (std::size_t t = 0; t < nt; ++t)
        for (std::size_t k = 0; k < no; ++k) {
            double m = 0.0, m2 = 0.0;
            for (auto& s : all) m += s.values[t][k];
            m /= replicas;
            for (auto& s : all) m2 += (s.values[t][k] - m) * (s.values[t][k] - m);
            out.values[t][k] = m;
            out.se[t][k] = replicas > 1 ? std::sqrt(m2 / (replicas - 1) / replicas) : NAN;
        }
    out.collisions = out.proposals = 0;
    out.max_drift = 0.0;
    for (auto& s : all) {
        out.collisions += s.collisions;
        out.proposals += s.proposals;
        out.max_drift = std::max(out.max_drift, s.max_drift);
    }
    return out;
}

double quartic_marginal_oracle(const BoltzmannSphereSpec& spec) {
    spec.validate();
    if (spec.z2() != 0.0) throw ParameterError("quartic oracle: radial form needs z = 0");
    const int d = spec.d;
    double rmax = std::sqrt(spec.E * (spec.N - 1.0) / spec.N);
    double area = std::exp(log_sphere_area(d));
    auto q = integrate(
        [&](double r) {
            std::vector<double> x(d, 0.0);
            x[0] = r;
            return area * std::pow(r, d + 3) * marginal_density(spec, 1, x);
        },
        0.0, rmax, 1e-13);
    return q.value;
}

EquilibriumCheck quartic_equilibrium(int N, int d, long long burn_in, long long samples, int thin,
                                     std::uint64_t seed) {
    if (samples < 20 || thin < 1) throw ParameterError("quartic check: need >= 20 samples and thin >= 1");
    BoltzmannSphereSpec spec(N, d, double(N));
    auto sys = ParticleSystem::single_hot(N, d, double(N));
    Rng rng(seed);
    for (long long k = 0; k < burn_in; ++k) step(sys, rng);
    std::vector<double> xs(samples);
    for (long long s = 0; s < samples; ++s) {
        for (int k = 0; k < thin; ++k) step(sys, rng);
        double r = 0.0;
        for (double x : sys.particle(0)) r += x * x;
        xs[s] = r * r;
    }
    const long long nb = 20, bl = samples / nb;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= samples;
    double bm2 = 0.0;
    for (long long b = 0; b < nb; ++b) {
        double m = 0.0;
        for (long long i = b * bl; i < (b + 1) * bl; ++i) m += xs[i];
        m /= bl;
        bm2 += (m - mean) * (m - mean);
    }
    double se = std::sqrt(bm2 / (nb - 1) / nb);
    double oracle = quartic_marginal_oracle(spec);
    return {mean, se, oracle, (mean - oracle) / se, samples};
}

}  // namespace kaclab
