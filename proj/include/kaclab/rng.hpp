#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace kaclab {

// mt19937_64 with hand-rolled conversions so streams are identical across
// standard libraries (std::normal_distribution is implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // open interval, safe for log()
    double uniform_pos() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }
    double normal();
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }
    std::uint64_t below(std::uint64_t n);  // uniform integer in [0, n)
    void unit_vector(std::span<double> out);

    // Stream for worker/chunk k of a run: seed + k, as documented.
    static Rng derive(std::uint64_t seed, std::uint64_t k) { return Rng(seed + k); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kaclab
