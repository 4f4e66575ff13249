#pragma once
// Correlated test-statistic vectors with sparse signals: the generator behind
// the FWER/power/detection experiments on abstract statistics.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scct/correlation.hpp"
#include "scct/linalg.hpp"
#include "scct/rng.hpp"

namespace scct {

enum class SignalPlacement { FirstK, Random };

struct SignalSpec {
    std::size_t count = 0;
    double strength = 0.0;  // mu_0 >= 0
    SignalPlacement placement = SignalPlacement::FirstK;

    void validate(std::size_t d) const {
        if (count > d) throw std::domain_error("signal count exceeds dimension");
        if (strength < 0.0) throw std::domain_error("signal strength must be non-negative");
    }
};

// signal strength sqrt(3 log d) / s^(1/3) used by the power experiments
inline double default_signal_strength(std::size_t d, std::size_t s) {
    return std::sqrt(3.0 * std::log(static_cast<double>(d))) /
           std::cbrt(static_cast<double>(s));
}

struct GeneratedStats {
    std::vector<double> stats;
    std::vector<char> truth;  // true where the alternative holds
};

// z ~ N_d(0, Sigma); at signal positions add strength * sign(z_i) so the
// signal always amplifies the magnitude of the null statistic
inline GeneratedStats gen_statistics_chol(const Matrix& chol, const SignalSpec& signal,
                                          RngStream& rng) {
    const std::size_t d = chol.rows();
    signal.validate(d);
    GeneratedStats out;
    out.stats = sample_mvn_chol(std::vector<double>(d, 0.0), chol, rng);
    out.truth.assign(d, 0);

    std::vector<std::size_t> pos;
    pos.reserve(signal.count);
    if (signal.placement == SignalPlacement::FirstK) {
        for (std::size_t i = 0; i < signal.count; ++i) pos.push_back(i);
    } else {
        // partial Fisher-Yates over index array
        std::vector<std::size_t> idx(d);
        for (std::size_t i = 0; i < d; ++i) idx[i] = i;
        for (std::size_t i = 0; i < signal.count; ++i) {
            const std::size_t j = i + rng.uniform_index(d - i);
            std::swap(idx[i], idx[j]);
            pos.push_back(idx[i]);
        }
    }
    for (std::size_t i : pos) {
        out.truth[i] = 1;
        out.stats[i] += (out.stats[i] >= 0.0 ? signal.strength : -signal.strength);
    }
    return out;
}

inline GeneratedStats gen_statistics(const CorrelationSpec& corr, const SignalSpec& signal,
                                     RngStream& rng) {
    return gen_statistics_chol(correlation_cholesky(corr), signal, rng);
}

}  // namespace scct
