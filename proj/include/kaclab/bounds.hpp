#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kaclab/charfn.hpp"
#include "kaclab/densities.hpp"

namespace kaclab {

// {check, params, margin, fitted_constant, status}
struct CheckReport {
    std::string check;
    std::vector<std::pair<std::string, double>> params;
    double margin = 0.0;
    double fitted_constant = 0.0;
    bool has_constant = false;
    std::string status;  // pass | fail | inconclusive | skipped
    std::string to_json() const;
};

struct TailBounds {
    std::array<double, 3> lhs{}, rhs{}, quad_err{};
    double margin;  // smallest (rhs - lhs) / rhs over the three bounds
    std::string status;
};

// The three one-dimensional Gaussian tail bounds. beta = 0 is accepted as the equality edge.
TailBounds gaussian_tail_bounds_check(double alpha, double beta);

struct FuzzSummary {
    long long trials = 0, violations = 0, inconclusive = 0;
    double min_margin = 0.0;
    std::vector<double> worst;  // parameters of the smallest margin
};

FuzzSummary fuzz_gaussian_tail_bounds(long long n, std::uint64_t seed);

// |S^{d-1}| int_beta^inf r^{m+d-1} e^{-alpha r^2} dr, by quadrature and by the incomplete gamma function
double radial_tail_quadrature(int m, int d, double alpha, double beta);
double radial_tail_closed(int m, int d, double alpha, double beta);
// LHS * e^{alpha beta^2/2} * min(alpha, ..., alpha^{[(m+d+2)/2]}) / max(beta^{m+d-2}, beta^{m+d-4}, ..., 1)
double radial_shape_ratio(int m, int d, double alpha, double beta);

struct RadialFit {
    double shape_constant;   // sup of radial_shape_ratio over the sweep
    double unit_alpha_constant;  // sup of LHS * alpha * e^{alpha beta^2/2} (alpha >= 1, beta <= 1)
    long long trials;
};
// alpha log-uniform on [1,100], beta uniform on (0,1]
RadialFit radial_tail_fit(int m, int d, long long n, std::uint64_t seed);

struct EnvelopeSummary {
    long long trials = 0, violations = 0;
    double min_log_margin = 0.0;  // log(envelope) - log(direct), smallest seen
    std::vector<double> worst;    // (rho, t, k, j, N)
};

// Binomial-term envelope for hhat^k gamma1hat^{N-k-1}, checked term by term in j and for the full sum.
// j < 0 means: check every j in [0,k].
EnvelopeSummary product_envelope_check(const GeneratingFunction& g, double beta, int k, int j, int N,
                                       long long samples, std::uint64_t seed);
// Random (p, t, k, j, N) over N in [4, 256].
EnvelopeSummary product_envelope_fuzz(int d, double delta, double beta, long long samples, std::uint64_t seed);

// delta (1 + 4 pi^2 t^2/(d^2 delta^2))^{-d/4} + (1-delta)(...)^{-d/4}
double mixture_modulus(int d, double delta, double t);
double contraction_edge(int d, double delta, double beta);  // d delta^{1+beta}/(4 pi)

struct ContractionResult {
    double value;   // modulus sum at the edge
    double margin;  // 1 - value
    double bound;   // 1 - d delta^{1+2beta}/16 + K delta^{1+4beta}
    bool monotone;
    std::string status;
};
// smallest K with value <= 1 - d delta^{1+2beta}/16 + K delta^{1+4beta} on the grid
double fit_contraction_K(int d, double beta, const std::vector<double>& deltas);
std::vector<double> default_contraction_grid();
ContractionResult mixture_contraction_check(const GeneratingFunction& g, double beta, double K);

enum class DomainKind { large_t, small_t_large_p, small_t_small_p };
const char* domain_name(DomainKind k);

struct DomainSpec {
    DomainKind kind;
    double delta, beta, cut_t, cut_p;
    static DomainSpec make(DomainKind k, int d, double delta, double beta);
};

struct DomainResult {
    double value;      // iint |hhat^N - gamma1hat^N| dp dt over the domain
    double predicted;  // decay factor with unit constants (xi dropped)
};

double domain_predicted_factor(const DomainSpec& dom, int d, int N, double sigma);
DomainResult domain_l1_integral(const GeneratingFunction& g, int N, const DomainSpec& dom,
                                const CharFnGrid& grid = {});
// Whole plane in one pass with its own panels (for the partition check).
double full_l1_integral(const GeneratingFunction& g, int N, const CharFnGrid& grid = {});

struct TotalL1 {
    double total;   // sum over the three domains
    double scaled;  // total * Sigma * N^{(d+1)/2}
    std::array<double, 3> parts;
};
TotalL1 total_l1_error(const GeneratingFunction& g, int N, double beta, const CharFnGrid& grid = {});

}  // namespace kaclab
