#pragma once
// Counter-based random number generation.
//
// Every draw is a pure function of (seed, stream, counter). Streams are assigned
// one per Monte Carlo replication, so replication r produces the same numbers no
// matter which thread runs it or in what order. Normals go through the inverse
// CDF so each consumes exactly one counter tick.

#include <cstdint>
#include <cmath>
#include <stdexcept>

#include "scct/dist.hpp"

namespace scct {

namespace detail {

// stafford mix 13 variant of splitmix64's finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::mix64(seed + 0x9e3779b97f4a7c15ULL) ^
               detail::mix64(stream * 0xbf58476d1ce4e5b9ULL + 0x2545f4914f6cdd1dULL)),
          counter_(0) {}

    std::uint64_t next_u64() {
        return detail::mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    // uniform on the open interval (0,1); never returns an exact endpoint
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer on [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::domain_error("uniform_index: n must be positive");
        return next_u64() % n;
    }

    // one counter tick per normal draw
    double normal() { return normal_quantile(uniform()); }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Marsaglia-Tsang; consumes a variable number of ticks, which is fine
    // because each replication owns its stream exclusively
    double gamma(double shape, double scale) {
        if (shape <= 0.0 || scale <= 0.0)
            throw std::domain_error("gamma: shape and scale must be positive");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
        }
    }

    std::uint64_t counter() const { return counter_; }
    void skip(std::uint64_t n) { counter_ += n; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace scct
