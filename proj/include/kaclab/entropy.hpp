#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kaclab/charfn.hpp"
#include "kaclab/densities.hpp"

namespace kaclab {

// F_N = prod f(v_i) / Z_N on the sphere E = N, z = 0.
struct ConditionedFamily {
    GeneratingFunction g;
    int N;
    CharFnGrid grid;
    LogNormalization log_zn;  // at (N, 0)

    static ConditionedFamily make(const GeneratingFunction& g, int N, const CharFnGrid& grid = {});
};

struct EntropyResult {
    double H;
    double H_over_N;
    double I1;            // E_F log f(v_1)
    double log_zn;
    double marginal_mass; // integral of the one-particle marginal, should be 1
    int nodes;
};

EntropyResult entropy_HN(const ConditionedFamily& fam, int radial_panels = 0);

struct LimitComponents {
    double I1, I1_limit;
    double log_zn_over_N, log_zn_limit;
    double H_over_N;  // I1 - log Z_N / N
};
LimitComponents entropy_limit_components(const ConditionedFamily& fam, const EntropyResult& h);
LimitComponents entropy_limit_components(const ConditionedFamily& fam);

// log( f(v1) f(v2) / f(v1') f(v2') ) for the collision with direction omega
double collision_log_ratio(const GeneratingFunction& g, std::span<const double> v1, std::span<const double> v2,
                           std::span<const double> omega);
// (1 - e^{-x}) x: the pair integrand divided by f(v1) f(v2). Never negative.
double production_term(double log_ratio);
// (p - p')(log p - log p') with p = f(v1) f(v2), p' after collision; symmetric in both exchanges
double symmetric_production_kernel(const GeneratingFunction& g, std::span<const double> v1,
                                   std::span<const double> v2, std::span<const double> omega);

struct ProductionOptions {
    long long samples = 100000;  // (v1, v2) draws
    int directions = 32;         // omega per draw
    std::string mode = "exact";  // exact | surrogate
    int table_r = 41, table_w = 25;
    double se_threshold = 0.1;  // SE / value above this -> increase-budget
    int chunks = 64;
};

struct ProductionResult {
    double pairing;     // <log F, (I - Q) F>, no N factor
    double pairing_se;
    double D;           // N * pairing
    double D_se;
    long long samples, outside, direct_evals;
    long long negative_terms;
    double table_error;  // max relative error of the log table at check points
    std::string status;  // ok | increase-budget
};

ProductionResult entropy_production_DN(const ConditionedFamily& fam, const ProductionOptions& opt,
                                       std::uint64_t seed);

// D / H, an upper-bound witness for Gamma_N
double gamma_upper_witness(double D, double H);

struct ScalingRow {
    int N;
    double delta_N;
    double H_over_N, H_gap;  // gap = d log 2 / 2 - H/N
    double D_over_N, D_se_over_N;
    double gamma_upper_witness;
    double production_ratio;  // D / (N delta log(1/delta))
    std::string status;
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;
    double slope_gap, slope_D, slope_gamma;
    double predicted_gamma_slope;  // -(1 - eta)
};

double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

ScalingStudy scaling_study(int d, double eta, double beta, const std::vector<int>& Ns, const ProductionOptions& opt,
                           std::uint64_t seed, const CharFnGrid& grid = {});

}  // namespace kaclab
