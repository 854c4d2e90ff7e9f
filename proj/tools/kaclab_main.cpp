// kaclab command line: one subcommand per table.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "kaclab/bounds.hpp"
#include "kaclab/charfn.hpp"
#include "kaclab/entropy.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/kac_walk.hpp"
#include "kaclab/report.hpp"
#include "kaclab/sphere.hpp"

using namespace kaclab;
using nlohmann::json;

namespace {

constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

struct Common {
    int d = 2;
    int N = 0;
    std::vector<int> N_list;
    double eta = NAN, beta = 0.5, delta = NAN, single_a = NAN;
    std::uint64_t seed = 1;
    long long budget = -1;
    std::string out, format = "csv";
    CharFnGrid grid;
};

void add_common(CLI::App* c, Common& o, bool with_n = true) {
    c->add_option("--d", o.d, "velocity dimension")->check(CLI::PositiveNumber);
    if (with_n) {
        c->add_option("--N", o.N, "number of particles");
        c->add_option("--N-list", o.N_list, "comma separated particle counts")->delimiter(',');
    }
    c->add_option("--eta", o.eta, "schedule exponent, delta_N = N^-(1-eta); default mid-window");
    c->add_option("--beta", o.beta, "domain exponent");
    c->add_option("--delta", o.delta, "fixed mixture weight instead of the schedule");
    c->add_option("--seed", o.seed, "RNG seed");
    c->add_option("--budget", o.budget, "Monte Carlo or fuzz budget");
    c->add_option("--out", o.out, "output file (default stdout)");
    c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--grid-rule", o.grid.rule, "binomial or bessel")->check(CLI::IsMember({"binomial", "bessel"}));
    c->add_option("--grid-rho-max", o.grid.rho_max, "radial truncation (0 = auto)");
    c->add_option("--grid-t-max", o.grid.t_max, "t truncation (0 = auto)");
    c->add_option("--grid-n-rho", o.grid.n_rho, "radial panels (0 = auto)");
    c->add_option("--grid-n-t", o.grid.n_t, "t panels (0 = auto)");
    c->add_option("--grid-cycles", o.grid.cycles_per_panel, "phase cycles per panel");
    c->add_option("--grid-eps", o.grid.eps, "admissible tail mass");
}

std::vector<int> n_values(const Common& o, bool required) {
    std::vector<int> ns = o.N_list;
    if (o.N > 0) ns.insert(ns.begin(), o.N);
    if (required && ns.empty()) throw CLI::RequiredError("--N or --N-list");
    return ns;
}

double eta_of(const Common& o) {
    if (!std::isnan(o.eta)) return o.eta;
    auto [lo, hi] = eta_window(o.beta, o.d);
    return 0.5 * (lo + hi);
}

// Mixture for a given N: fixed delta, the schedule, or a single Maxwellian.
GeneratingFunction family_for(const Common& o, int N) {
    if (!std::isnan(o.single_a)) return GeneratingFunction::single(o.d, o.single_a);
    if (!std::isnan(o.delta)) return GeneratingFunction(o.d, o.delta);
    auto sp = ScheduleParams::make(N, eta_of(o), o.beta, o.d);
    return GeneratingFunction(o.d, sp.delta_N);
}

void validate_schedule(const Common& o, const std::vector<int>& ns) {
    if (!std::isnan(o.single_a) || !std::isnan(o.delta)) return;
    for (int N : ns) ScheduleParams::make(N, eta_of(o), o.beta, o.d);
}

json base_config(const std::string& cmd, const Common& o) {
    json j{{"command", cmd}, {"d", o.d}, {"N", o.N}, {"N_list", o.N_list}, {"beta", o.beta}, {"seed", o.seed},
           {"budget", o.budget}, {"grid", json::parse(o.grid.to_json())}};
    j["eta"] = std::isnan(o.eta) ? json(nullptr) : json(o.eta);
    j["delta"] = std::isnan(o.delta) ? json(nullptr) : json(o.delta);
    j["single_a"] = std::isnan(o.single_a) ? json(nullptr) : json(o.single_a);
    return j;
}

RowMeta meta_for(const json& cfg, const Common& o) {
    return {hex64(fnv1a64(cfg.dump())), o.seed, hex64(o.grid.hash())};
}

void emit(const Table& t, const Common& o) {
    std::ofstream f;
    std::ostream* os = &std::cout;
    if (!o.out.empty()) {
        f.open(o.out);
        if (!f) throw std::runtime_error("cannot open " + o.out);
        os = &f;
    }
    if (o.format == "json")
        t.write_json(*os);
    else
        t.write_csv(*os);
}

double num(double x) { return x; }

// ---------------------------------------------------------------- commands

struct ZnOpts {
    double E = NAN;
    std::vector<double> z;
};

int cmd_zn(const Common& o, const ZnOpts& zo) {
    auto ns = n_values(o, true);
    validate_schedule(o, ns);
    json cfg = base_config("zn", o);
    cfg["E"] = std::isnan(zo.E) ? json(nullptr) : json(zo.E);
    cfg["z"] = zo.z;
    auto meta = meta_for(cfg, o);
    Table t{"zn",
            {"N", "d", "delta", "E", "z_norm", "log_zn", "hN", "error_estimate", "oracle", "oracle_delta"},
            {},
            {}};
    for (int N : ns) {
        auto g = family_for(o, N);
        double E = std::isnan(zo.E) ? double(N) : zo.E;
        std::vector<double> z = zo.z.empty() ? std::vector<double>(o.d, 0.0) : zo.z;
        if (static_cast<int>(z.size()) != o.d) throw ParameterError("--z needs d components");
        double zn = 0.0;
        for (double x : z) zn += x * x;
        auto r = z_n(g, N, E, z, o.grid);
        double oracle = NAN;
        if (g.is_single())
            oracle = log_zn_gaussian(o.d, N, g.a1(), E);
        else if (N == 2)
            oracle = z2_oracle(g, E, z);
        double delta = std::isnan(oracle) ? NAN : std::abs(r.log_zn - oracle) / std::max(1.0, std::abs(oracle));
        t.add({(long long)N, (long long)o.d, g.is_single() ? NAN : g.delta(), E, std::sqrt(zn), r.log_zn, r.hN_value,
               r.error_estimate, oracle, delta},
              meta);
    }
    emit(t, o);
    return 0;
}

int cmd_approx_scan(const Common& o, bool with_l1) {
    auto ns = n_values(o, false);
    if (ns.empty()) ns = {32, 64, 128, 256};
    validate_schedule(o, ns);
    json cfg = base_config("approx-scan", o);
    cfg["l1"] = with_l1;
    auto meta = meta_for(cfg, o);
    Table t{"approx_scan",
            {"N", "delta", "sup_error", "scaled_error", "arg_u", "arg_v", "l1_total", "l1_scaled", "verdict"},
            {},
            {}};
    std::vector<double> s;
    std::vector<std::vector<Cell>> rows;
    for (int N : ns) {
        auto g = family_for(o, N);
        auto r = approx_error_scan(g, N, o.grid, ScanLattice::standard(g, N));
        double l1 = NAN, l1s = NAN;
        if (with_l1 && !g.is_single()) {
            auto tl = total_l1_error(g, N, o.beta, o.grid);
            l1 = tl.total;
            l1s = tl.scaled;
        }
        s.push_back(r.scaled);
        rows.push_back({(long long)N, g.is_single() ? NAN : g.delta(), r.sup_error, r.scaled, r.arg_u, r.arg_v, l1, l1s});
    }
    std::string verdict = "n/a";
    if (s.size() > 1) {
        verdict = "decreasing";
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i] < s[i - 1])) verdict = "not-decreasing";
    }
    for (auto& r : rows) {
        r.push_back(verdict);
        t.add(r, meta);
    }
    emit(t, o);
    return 0;
}

int cmd_entropy(const Common& o) {
    auto ns = n_values(o, false);
    if (ns.empty()) ns = {32, 64, 128, 256};
    validate_schedule(o, ns);
    auto meta = meta_for(base_config("entropy", o), o);
    Table t{"entropy",
            {"N", "delta", "H", "H_over_N", "gap", "I1", "I1_limit", "logZ_over_N", "logZ_limit", "marginal_mass"},
            {},
            {}};
    for (int N : ns) {
        auto fam = ConditionedFamily::make(family_for(o, N), N, o.grid);
        auto h = entropy_HN(fam);
        auto lc = entropy_limit_components(fam, h);
        t.add({(long long)N, fam.g.is_single() ? NAN : fam.g.delta(), h.H, h.H_over_N,
               0.5 * o.d * std::log(2.0) - h.H_over_N, lc.I1, lc.I1_limit, lc.log_zn_over_N, lc.log_zn_limit,
               h.marginal_mass},
              meta);
    }
    emit(t, o);
    return 0;
}

ProductionOptions production_options(const Common& o, int directions, const std::string& mode) {
    ProductionOptions p;
    if (o.budget >= 0) p.samples = o.budget;
    p.directions = directions;
    p.mode = mode;
    return p;
}

int cmd_production(const Common& o, int directions, const std::string& mode) {
    auto ns = n_values(o, false);
    if (ns.empty()) ns = {32, 64, 128, 256};
    validate_schedule(o, ns);
    json cfg = base_config("production", o);
    cfg["directions"] = directions;
    cfg["mode"] = mode;
    auto meta = meta_for(cfg, o);
    auto popt = production_options(o, directions, mode);
    Table t{"production",
            {"N", "delta", "pairing", "pairing_se", "D", "D_se", "ratio_delta_log", "table_error", "outside",
             "direct_evals", "status"},
            {},
            {}};
    bool noisy = false;
    for (int N : ns) {
        auto fam = ConditionedFamily::make(family_for(o, N), N, o.grid);
        auto p = entropy_production_DN(fam, popt, o.seed + static_cast<std::uint64_t>(N));
        double dl = fam.g.is_single() ? NAN : fam.g.delta();
        t.add({(long long)N, dl, p.pairing, p.pairing_se, p.D, p.D_se, p.pairing / (dl * std::log(1.0 / dl)),
               p.table_error, p.outside, p.direct_evals, p.status},
              meta);
        noisy = noisy || p.status != "ok";
    }
    emit(t, o);
    if (noisy) std::fprintf(stderr, "note: some rows need a larger --budget\n");
    return 0;
}

int cmd_gamma(const Common& o, int directions) {
    auto ns = n_values(o, false);
    if (!o.N_list.empty() || o.N > 0) {
        if (ns.empty()) throw CLI::ValidationError("--N-list", "empty");
    } else {
        ns = {32, 64, 128, 256};
    }
    double eta = eta_of(o);
    validate_schedule(o, ns);
    json cfg = base_config("gamma", o);
    cfg["directions"] = directions;
    auto meta = meta_for(cfg, o);
    auto st = scaling_study(o.d, eta, o.beta, ns, production_options(o, directions, "exact"), o.seed, o.grid);
    Table t{"gamma",
            {"N", "delta_N", "H_over_N", "H_gap", "D_over_N", "D_se_over_N", "gamma_upper_witness",
             "production_ratio", "slope_gamma", "predicted_slope", "slope_verdict", "status"},
            {},
            {}};
    std::string verdict = std::abs(st.slope_gamma - st.predicted_gamma_slope) <= 0.15 ? "within" : "outside";
    if (ns.size() < 2) verdict = "n/a";
    for (auto& r : st.rows)
        t.add({(long long)r.N, r.delta_N, r.H_over_N, r.H_gap, r.D_over_N, r.D_se_over_N, r.gamma_upper_witness,
               r.production_ratio, st.slope_gamma, st.predicted_gamma_slope, verdict, r.status},
              meta);
    emit(t, o);
    for (auto& r : st.rows)
        if (r.status.rfind("error", 0) == 0) return kExitCompute;
    return 0;
}

int cmd_validate(const Common& o) {
    long long n = o.budget >= 0 ? o.budget : 10000;
    json cfg = base_config("validate", o);
    auto meta = meta_for(cfg, o);
    Table t{"validate", {"check", "params", "margin", "fitted_constant", "status", "detail"}, {}, {}};
    double dl = std::isnan(o.delta) ? 0.1 : o.delta;
    if (n == 0) {
        for (const char* c : {"tail_bounds", "radial_tail", "product_envelope", "mixture_contraction"})
            t.add({std::string(c), std::string("{}"), NAN, NAN, std::string("skipped"), std::string("")}, meta);
        emit(t, o);
        return 0;
    }
    bool bad = false;
    auto params = [](json j) { return j.dump(); };

    auto fz = fuzz_gaussian_tail_bounds(n, o.seed);
    std::string st = fz.violations ? "fail" : (fz.inconclusive ? "inconclusive" : "pass");
    bad = bad || fz.violations;
    t.add({std::string("tail_bounds"), params({{"trials", fz.trials}}), fz.min_margin, NAN, st,
           json(fz.worst).dump()},
          meta);

    std::vector<std::pair<int, int>> shapes{{0, 1}, {2, 2}};
    if (o.d != 2) shapes.push_back({2, o.d});
    for (auto [m, d] : shapes) {
        auto rf = radial_tail_fit(m, d, n, o.seed);
        bool ok = std::isfinite(rf.shape_constant) && std::isfinite(rf.unit_alpha_constant);
        bad = bad || !ok;
        t.add({std::string("radial_tail"), params({{"m", m}, {"d", d}, {"trials", rf.trials}}), NAN, rf.shape_constant,
               std::string(ok ? "pass" : "fail"), json({{"unit_alpha_constant", rf.unit_alpha_constant}}).dump()},
              meta);
    }

    auto ef = product_envelope_fuzz(o.d, dl, o.beta, n, o.seed);
    bad = bad || ef.violations;
    t.add({std::string("product_envelope"), params({{"d", o.d}, {"delta", dl}, {"beta", o.beta}, {"trials", ef.trials}}),
           ef.min_log_margin, NAN, std::string(ef.violations ? "fail" : "pass"), json(ef.worst).dump()},
          meta);

    auto grid = default_contraction_grid();
    double K = fit_contraction_K(o.d, o.beta, grid);
    for (double x : {0.3, 0.1, 0.03, 0.01}) {
        auto c = mixture_contraction_check(GeneratingFunction(o.d, x), o.beta, K);
        bad = bad || c.status != "pass";
        t.add({std::string("mixture_contraction"), params({{"d", o.d}, {"delta", x}, {"beta", o.beta}}), c.margin, K,
               c.status, std::string("shape-verified")},
              meta);
    }
    emit(t, o);
    return bad ? kExitCompute : 0;
}

struct WalkOpts {
    double t_end = 10.0, dt = 1.0, gamma = 0.0;
    int replicas = 8;
    std::string kernel, init = "single_hot";
    std::vector<std::string> observables{"one", "v1_sq", "v1_quartic", "mean_quartic"};
    bool discrete = false, equilibrium = false;
    long long burn_in = -1;
};

int cmd_walk(const Common& o, const WalkOpts& w) {
    int N = o.N > 0 ? o.N : 64;
    json cfg = base_config("walk", o);
    cfg.update(json{{"t_end", w.t_end}, {"dt", w.dt}, {"gamma", w.gamma}, {"replicas", w.replicas},
                    {"kernel", w.kernel}, {"init", w.init}, {"observables", w.observables},
                    {"discrete", w.discrete}, {"equilibrium", w.equilibrium}, {"burn_in", w.burn_in}});
    auto meta = meta_for(cfg, o);
    if (w.equilibrium) {
        long long samples = o.budget >= 0 ? o.budget : 10000;
        long long burn = w.burn_in >= 0 ? w.burn_in : 200LL * N;
        auto q = quartic_equilibrium(N, o.d, burn, samples, N, o.seed);
        Table t{"walk_equilibrium", {"N", "d", "samples", "mean_v1_quartic", "se", "oracle", "z_score", "verdict"}, {},
                {}};
        t.add({(long long)N, (long long)o.d, q.samples, q.mean, q.se, q.oracle, q.z_score,
               std::string(std::abs(q.z_score) <= 3.0 ? "within-3se" : "outside-3se")},
              meta);
        emit(t, o);
        return 0;
    }
    ParticleSystem init;
    if (w.init == "single_hot") {
        init = ParticleSystem::single_hot(N, o.d, double(N));
    } else if (w.init == "uniform") {
        Rng r = Rng::derive(o.seed, 1u << 20);
        init = ParticleSystem::uniform(BoltzmannSphereSpec(N, o.d, double(N)), r);
    } else {
        std::ifstream f(w.init);
        if (!f) throw ParameterError("cannot read initial condition file " + w.init);
        std::stringstream ss;
        ss << f.rdbuf();
        init = ParticleSystem::from_json(ss.str());
    }
    std::vector<Observable> obs;
    for (auto& n : w.observables) obs.push_back(named_observable(n));
    std::vector<double> ts;
    for (int k = 0; k * w.dt <= w.t_end + 1e-12; ++k) ts.push_back(k * w.dt);
    RunOptions ro{w.gamma, w.kernel, !w.discrete};
    auto s = run_replicas(init, w.replicas, w.t_end, ts, obs, o.seed, ro);
    Table t{"walk", {"time", "observable", "value", "se", "acceptance_rate", "max_drift"}, {}, {}};
    double acc = s.proposals ? double(s.collisions) / s.proposals : NAN;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        for (std::size_t k = 0; k < obs.size(); ++k)
            t.add({s.times[i], s.names[k], s.values[i][k], s.se[i][k], acc, s.max_drift}, meta);
    emit(t, o);
    return 0;
}

int cmd_fubini(const Common& o, int j, double E) {
    int N = o.N > 0 ? o.N : 4;
    long long samples = o.budget >= 0 ? o.budget : 200000;
    BoltzmannSphereSpec spec(N, o.d, std::isnan(E) ? double(N) : E);
    json cfg = base_config("fubini-check", o);
    cfg["j"] = j;
    cfg["E"] = spec.E;
    auto meta = meta_for(cfg, o);
    const int d = o.d;
    std::vector<std::pair<std::string, SphereFn>> fns{
        {"v1_sq",
         [d](std::span<const double> v) {
             double s = 0.0;
             for (int k = 0; k < d; ++k) s += v[k] * v[k];
             return s;
         }},
        {"v1_quartic",
         [d](std::span<const double> v) {
             double s = 0.0;
             for (int k = 0; k < d; ++k) s += v[k] * v[k];
             return s * s;
         }},
        {"cos_block",
         [d, j](std::span<const double> v) {
             double s = 0.0;
             for (int i = 0; i < j * d; ++i) s += (i + 1) * v[i];
             return std::cos(s / j);
         }},
    };
    Table t{"fubini", {"function", "N", "d", "j", "lhs", "lhs_se", "rhs", "rhs_se", "z_score"}, {}, {}};
    for (std::size_t i = 0; i < fns.size(); ++i) {
        auto r = fubini_check(fns[i].second, spec, j, static_cast<int>(samples), o.seed + i);
        t.add({fns[i].first, (long long)N, (long long)d, (long long)j, r.lhs, r.lhs_se, r.rhs, r.rhs_se,
               (r.lhs - r.rhs) / r.combined_se()},
              meta);
    }
    emit(t, o);
    return 0;
}

void error_line(const char* kind, const std::string& msg) {
    std::fprintf(stderr, "%s\n", json{{"error", kind}, {"message", msg}}.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kaclab: normalization functions, entropy and the Kac walk on the Boltzmann sphere.\n"
                 "Worker threads: KACLAB_WORKERS (default: hardware concurrency).\n\n"
                 "Examples:\n"
                 "  kaclab zn --d 2 --N-list 4,8 --single-a 0.25\n"
                 "  kaclab zn --N 2 --delta 0.1 --E 2 --z 0.5,0\n"
                 "  kaclab approx-scan --N-list 32,64,128,256 --beta 0.5\n"
                 "  kaclab entropy --N-list 32,64 --format json\n"
                 "  kaclab production --N 64 --budget 100000\n"
                 "  kaclab gamma --N-list 32,64,128,256 --budget 100000\n"
                 "  kaclab validate --budget 10000 --seed 7\n"
                 "  kaclab walk --N 64 --t-end 20 --kernel relative_speed --gamma 1\n"
                 "  kaclab walk --N 64 --equilibrium --budget 10000\n"
                 "  kaclab fubini-check --N 4 --j 1"};
    app.require_subcommand(1);
    Common o;
    ZnOpts zo;
    WalkOpts wo;
    bool with_l1 = false;
    int directions = 32, fj = 1;
    std::string mode = "exact";
    double fE = NAN;

    auto* zn = app.add_subcommand("zn", "log Z_N by characteristic-function inversion, with oracle deltas");
    add_common(zn, o);
    zn->add_option("--single-a", o.single_a, "single Maxwellian M_a instead of the mixture");
    zn->add_option("--E", zo.E, "energy (default N)");
    zn->add_option("--z", zo.z, "momentum, comma separated")->delimiter(',');

    auto* scan = app.add_subcommand("approx-scan", "scaled sup error against gamma_N over the lattice");
    add_common(scan, o);
    scan->add_option("--single-a", o.single_a, "single Maxwellian M_a instead of the mixture");
    scan->add_flag("--l1", with_l1, "also integrate |hhat^N - gamma1hat^N| over the three domains");

    auto* ent = app.add_subcommand("entropy", "H_N and its limit components");
    add_common(ent, o);
    ent->add_option("--single-a", o.single_a, "single Maxwellian M_a instead of the mixture");

    auto* prod = app.add_subcommand("production", "entropy production D(F_N) by Monte Carlo");
    add_common(prod, o);
    prod->add_option("--single-a", o.single_a, "single Maxwellian M_a instead of the mixture");
    prod->add_option("--directions", directions, "omega draws per (v1, v2)")->check(CLI::PositiveNumber);
    prod->add_option("--mode", mode, "exact or surrogate")->check(CLI::IsMember({"exact", "surrogate"}));

    auto* gam = app.add_subcommand("gamma", "scaling study of H/N, D/N and D/H along the schedule");
    add_common(gam, o);
    gam->add_option("--directions", directions, "omega draws per (v1, v2)")->check(CLI::PositiveNumber);

    auto* val = app.add_subcommand("validate", "inequality fuzz suites");
    add_common(val, o, false);

    auto* walk = app.add_subcommand("walk", "Kac walk trajectories");
    add_common(walk, o);
    walk->add_option("--t-end", wo.t_end, "final time");
    walk->add_option("--dt", wo.dt, "sampling interval");
    walk->add_option("--replicas", wo.replicas, "independent trajectories")->check(CLI::PositiveNumber);
    walk->add_option("--kernel", wo.kernel, "energy_form or relative_speed")
        ->check(CLI::IsMember({"energy_form", "relative_speed"}));
    walk->add_option("--gamma", wo.gamma, "kernel exponent");
    walk->add_option("--init", wo.init, "single_hot, uniform, or a JSON file of velocities");
    walk->add_option("--observables", wo.observables, "one,v1_sq,v1_quartic,mean_quartic,energy,momentum")
        ->delimiter(',');
    walk->add_flag("--discrete", wo.discrete, "time = steps/N instead of exponential clocks");
    walk->add_flag("--equilibrium", wo.equilibrium, "E|v1|^4 after burn-in against the marginal oracle");
    walk->add_option("--burn-in", wo.burn_in, "collisions before sampling (default 200 N)");

    auto* fub = app.add_subcommand("fubini-check", "both sides of the sphere Fubini formula by Monte Carlo");
    add_common(fub, o);
    fub->add_option("--j", fj, "frozen particles");
    fub->add_option("--E", fE, "energy (default N)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*zn) return cmd_zn(o, zo);
        if (*scan) return cmd_approx_scan(o, with_l1);
        if (*ent) return cmd_entropy(o);
        if (*prod) return cmd_production(o, directions, mode);
        if (*gam) return cmd_gamma(o, directions);
        if (*val) return cmd_validate(o);
        if (*walk) return cmd_walk(o, wo);
        if (*fub) return cmd_fubini(o, fj, fE);
    } catch (const CLI::Error& e) {
        error_line("usage", e.what());
        return kExitUsage;
    } catch (const ScheduleOutOfRange& e) {
        error_line("schedule", e.what());
        return kExitUsage;
    } catch (const ParameterError& e) {
        error_line("parameter", e.what());
        return kExitUsage;
    } catch (const GridTooSmall& e) {
        error_line("grid", e.what());
        return kExitCompute;
    } catch (const NumericalError& e) {
        error_line("numerical", e.what());
        return kExitCompute;
    } catch (const std::exception& e) {
        error_line("internal", e.what());
        return kExitCompute;
    }
    return kExitUsage;
}
