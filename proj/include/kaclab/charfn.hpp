#pragma once
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kaclab/densities.hpp"

namespace kaclab {

using cplx = std::complex<double>;

// Characteristic function of the couple (V, |V|^2), V ~ M_a, at |p| = rho.
cplx h_hat_single(double a, int d, double rho, double t);
cplx log_h_hat_single(double a, int d, double rho, double t);
cplx h_hat(const GeneratingFunction& g, double rho, double t);
// hhat^N via exp(N Log hhat); branch-independent for integer N
cplx h_hat_pow(const GeneratingFunction& g, int N, double rho, double t);
// Gaussian with the same first two moments of (V, |V|^2).
cplx gamma1_hat(const GeneratingFunction& g, double rho, double t);
cplx gamma1_hat_pow(const GeneratingFunction& g, int N, double rho, double t);

double gamma_N_log_density(const GeneratingFunction& g, int N, double u, double vmod);
double gamma_N_density(const GeneratingFunction& g, int N, double u, double vmod);

struct CharFnGrid {
    std::string rule = "binomial";  // "binomial" (closed-form p integral) or "bessel" (radial table)
    double rho_max = 0.0;            // 0 = choose from the envelope
    double t_max = 0.0;
    int n_rho = 0;  // panels per t node, 0 = from phase scan
    int n_t = 0;    // panels on [0, t_max], 0 = from phase scan
    double cycles_per_panel = 1.0;
    double eps = 1e-10;  // admissible relative tail mass

    std::string to_json() const;
    static CharFnGrid from_json(const std::string& s);
    std::uint64_t hash() const;
};

struct InversionResult {
    double value = 0.0;         // h^{*N}(z,u), clipped at 0
    double raw = 0.0;           // unclipped real part
    double imag_residue = 0.0;  // |Im| / max(|Re|, tiny)
    double error_estimate = 0.0;
    double tail_mass = 0.0;
};

class Inverter {
public:
    virtual ~Inverter() = default;
    virtual InversionResult at(double zmod, double u) const = 0;
    // result[iz * us.size() + iu]
    virtual std::vector<InversionResult> table(const std::vector<double>& zs, const std::vector<double>& us) const;
    virtual std::vector<InversionResult> pairs(const std::vector<std::pair<double, double>>& zu) const;
    virtual std::size_t node_count() const = 0;
    int N() const { return N_; }

protected:
    int N_ = 0;
};

// Built for a fixed (g, N) and a box of query points u <= u_max, |z| <= z_max.
std::unique_ptr<Inverter> make_inverter(const GeneratingFunction& g, int N, const CharFnGrid& grid, double u_max,
                                        double z_max);

InversionResult invert_radial(const GeneratingFunction& g, int N, double zmod, double u, const CharFnGrid& grid = {});

struct LogNormalization {
    double log_zn;
    double log_prefactor;  // log of |S^{d(N-1)-1}| R^{d(N-1)-2} / (2 N^{d/2})
    double hN_value;
    double error_estimate;
    double imag_residue;
};

double sphere_log_prefactor(int d, int N, double E, double z2);
LogNormalization z_n(const GeneratingFunction& g, int N, double E, const std::vector<double>& z,
                     const CharFnGrid& grid = {});
// Closed form for the single Maxwellian: f^{(x)N} is constant on the sphere.
double log_zn_gaussian(int d, int N, double a, double E);

// log Z_2 by quadrature over the circle (d = 2) or the polar angle
double z2_oracle(const GeneratingFunction& g, double E, const std::vector<double>& z, int nodes = 4096);

struct ScanLattice {
    double u_lo, u_hi;
    int n_u;
    double v_hi;
    int n_v;
    static ScanLattice standard(const GeneratingFunction& g, int N);
};

struct ScanResult {
    double sup_error;
    double scaled;  // Sigma N^{(d+1)/2} sup_error
    double arg_u, arg_v;
    double h_at_arg, gamma_at_arg;
};

ScanResult approx_error_scan(const GeneratingFunction& g, int N, const CharFnGrid& grid, const ScanLattice& lat);

}  // namespace kaclab
