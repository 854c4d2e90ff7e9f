#pragma once
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace kaclab {

double maxwellian_log_pdf(std::span<const double> v, double a);
double maxwellian_pdf(std::span<const double> v, double a);
// radial versions take |v|^2
double maxwellian_log_pdf_r2(double r2, int d, double a);

struct Component {
    double weight;
    double a;  // variance parameter per coordinate
};

// Two-component mixture f_delta, or a single Maxwellian M_a (oracle mode).
class GeneratingFunction {
public:
    GeneratingFunction(int d, double delta);
    static GeneratingFunction single(int d, double a);

    int d() const { return d_; }
    double delta() const { return delta_; }
    bool is_single() const { return comps_.size() == 1; }
    const std::vector<Component>& components() const { return comps_; }
    double a1() const { return comps_.front().a; }
    double a2() const { return comps_.back().a; }

    double log_pdf_r2(double r2) const;
    double pdf_r2(double r2) const;
    double log_pdf(std::span<const double> v) const;
    double pdf(std::span<const double> v) const;

    double second_moment() const;  // E|V|^2
    double fourth_moment() const;  // E|V|^4
    double sigma_sq() const;       // Var |V|^2

    template <class R>
    void sample(R& rng, std::span<double> out) const {
        double a = comps_.back().a;
        if (comps_.size() == 2 && rng.uniform() < comps_[0].weight) a = comps_[0].a;
        double s = std::sqrt(a);
        for (auto& x : out) x = s * rng.normal();
    }

private:
    GeneratingFunction() = default;
    int d_ = 2;
    double delta_ = 0.0;
    std::vector<Component> comps_;
};

// (d+2)/(4 d delta (1-delta)) - 1
double sigma_sq(int d, double delta);

std::pair<double, double> eta_window(double beta, int d);

double delta_schedule(int N, double eta);

struct ScheduleParams {
    int N;
    double eta, beta, delta_N, sigma_sq;
    static ScheduleParams make(int N, double eta, double beta, int d);
};

}  // namespace kaclab
