#include "kaclab/densities.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

using std::numbers::pi;

double maxwellian_log_pdf_r2(double r2, int d, double a) {
    if (!(a > 0.0)) throw ParameterError("maxwellian: variance parameter must be positive");
    return -0.5 * d * std::log(2.0 * pi * a) - r2 / (2.0 * a);
}

double maxwellian_log_pdf(std::span<const double> v, double a) {
    double r2 = 0.0;
    for (double x : v) r2 += x * x;
    return maxwellian_log_pdf_r2(r2, static_cast<int>(v.size()), a);
}

double maxwellian_pdf(std::span<const double> v, double a) { return std::exp(maxwellian_log_pdf(v, a)); }

GeneratingFunction::GeneratingFunction(int d, double delta) : d_(d), delta_(delta) {
    if (d < 1) throw ParameterError("dimension must be >= 1");
    if (!(delta > 0.0 && delta < 0.5))
        throw ParameterError("delta must lie in (0, 1/2), got " + std::to_string(delta));
    comps_ = {{delta, 1.0 / (2.0 * d * delta)}, {1.0 - delta, 1.0 / (2.0 * d * (1.0 - delta))}};
}

GeneratingFunction GeneratingFunction::single(int d, double a) {
    if (d < 1) throw ParameterError("dimension must be >= 1");
    if (!(a > 0.0)) throw ParameterError("single Maxwellian needs a > 0");
    GeneratingFunction g;
    g.d_ = d;
    g.delta_ = 0.0;
    g.comps_ = {{1.0, a}};
    return g;
}

double GeneratingFunction::log_pdf_r2(double r2) const {
    if (comps_.size() == 1) return maxwellian_log_pdf_r2(r2, d_, comps_[0].a);
    double l0 = std::log(comps_[0].weight) + maxwellian_log_pdf_r2(r2, d_, comps_[0].a);
    double l1 = std::log(comps_[1].weight) + maxwellian_log_pdf_r2(r2, d_, comps_[1].a);
    double m = std::max(l0, l1);
    return m + std::log1p(std::exp(std::min(l0, l1) - m));
}

double GeneratingFunction::pdf_r2(double r2) const { return std::exp(log_pdf_r2(r2)); }

double GeneratingFunction::log_pdf(std::span<const double> v) const {
    double r2 = 0.0;
    for (double x : v) r2 += x * x;
    return log_pdf_r2(r2);
}

double GeneratingFunction::pdf(std::span<const double> v) const { return std::exp(log_pdf(v)); }

double GeneratingFunction::second_moment() const {
    double s = 0.0;
    for (auto& c : comps_) s += c.weight * d_ * c.a;
    return s;
}

double GeneratingFunction::fourth_moment() const {
    double s = 0.0;
    for (auto& c : comps_) s += c.weight * c.a * c.a * d_ * (d_ + 2);
    return s;
}

double GeneratingFunction::sigma_sq() const {
    double m2 = second_moment();
    return fourth_moment() - m2 * m2;
}

double sigma_sq(int d, double delta) { return (d + 2.0) / (4.0 * d * delta * (1.0 - delta)) - 1.0; }

std::pair<double, double> eta_window(double beta, int d) {
    if (!(beta > 0.0)) throw ParameterError("beta must be positive");
    if (d < 2) throw ParameterError("eta_window needs d >= 2");
    double lo = 2.0 * beta / (1.0 + 2.0 * beta);
    double hi = (3.0 + d) * beta / (1.0 + 3.0 * beta + 0.5 * d + d * beta);
    return {lo, hi};
}

double delta_schedule(int N, double eta) {
    if (N < 2) throw ParameterError("delta_schedule: N must be >= 2");
    if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("delta_schedule: eta must lie in (0,1)");
    double dl = std::pow(static_cast<double>(N), -(1.0 - eta));
    if (!(dl < 0.5)) {
        // smallest N with N^{-(1-eta)} < 1/2
        int nmin = static_cast<int>(std::floor(std::pow(2.0, 1.0 / (1.0 - eta)))) + 1;
        while (std::pow(static_cast<double>(nmin), -(1.0 - eta)) >= 0.5) ++nmin;
        throw ScheduleOutOfRange("delta_N = " + std::to_string(dl) + " >= 1/2 at N = " + std::to_string(N) +
                                     "; minimal admissible N is " + std::to_string(nmin),
                                 nmin);
    }
    return dl;
}

ScheduleParams ScheduleParams::make(int N, double eta, double beta, int d) {
    auto [lo, hi] = eta_window(beta, d);
    if (!(eta > lo && eta < hi))
        throw ParameterError("eta = " + std::to_string(eta) + " outside the admissible window (" +
                             std::to_string(lo) + ", " + std::to_string(hi) + ")");
    double dl = delta_schedule(N, eta);
    return {N, eta, beta, dl, kaclab::sigma_sq(d, dl)};
}

}  // namespace kaclab
