#include "kaclab/rng.hpp"

#include <cmath>

namespace kaclab {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method
    double x, y, s;
    do {
        x = 2.0 * uniform() - 1.0;
        y = 2.0 * uniform() - 1.0;
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * m;
    has_spare_ = true;
    return x * m;
}

std::uint64_t Rng::below(std::uint64_t n) {
    // rejection to avoid modulo bias
    std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do { r = eng_(); } while (r >= lim);
    return r % n;
}

void Rng::unit_vector(std::span<double> out) {
    double n2;
    do {
        n2 = 0.0;
        for (auto& x : out) {
            x = normal();
            n2 += x * x;
        }
    } while (n2 < 1e-300);
    double inv = 1.0 / std::sqrt(n2);
    for (auto& x : out) x *= inv;
}

}  // namespace kaclab
