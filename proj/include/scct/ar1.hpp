#pragma once
// Stationary Gaussian AR(1): simulation, the conditional-MLE coefficient fit
// used for critical-value lookup, and the sample lag-1 autocorrelation used
// for reporting.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scct/rng.hpp"

namespace scct {

struct Ar1Fit {
    double theta_hat = 0.0;  // clamped to [-0.999, 0.999]
    std::size_t n_obs = 0;
};

// Unit marginal variance: X_0 ~ N(0,1), innovations N(0, 1 - theta^2)
inline std::vector<double> simulate_ar1(double theta, std::size_t length, RngStream& rng,
                                        std::size_t burn_in = 0) {
    if (std::fabs(theta) >= 1.0) throw std::domain_error("simulate_ar1: |theta| < 1 required");
    const double innov_sd = std::sqrt(1.0 - theta * theta);
    double x = rng.normal();
    for (std::size_t i = 0; i < burn_in; ++i) x = theta * x + innov_sd * rng.normal();
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) {
        out[i] = x;
        x = theta * x + innov_sd * rng.normal();
    }
    return out;
}

// Conditional MLE for the Gaussian AR(1) with unknown mean: the lag-1
// least-squares coefficient of the demeaned series,
// sum((x_i - xbar)(x_{i-1} - xbar)) / sum((x_{i-1} - xbar)^2), clamped to
// +/-0.999. Demeaning keeps the persistence estimate meaningful on sequences
// whose level is shifted by the alternative (e.g. a trending statistic path).
inline Ar1Fit fit_ar1(const std::vector<double>& stats, std::size_t min_length = 30) {
    if (stats.size() < min_length)
        throw std::domain_error("fit_ar1: series shorter than minimum length");
    double mean = 0.0;
    for (double v : stats) mean += v;
    mean /= static_cast<double>(stats.size());
    double num = 0.0, den = 0.0;
    bool constant = true;
    for (std::size_t i = 1; i < stats.size(); ++i) {
        num += (stats[i] - mean) * (stats[i - 1] - mean);
        den += (stats[i - 1] - mean) * (stats[i - 1] - mean);
        if (stats[i] != stats[0]) constant = false;
    }
    if (constant || den == 0.0) throw std::domain_error("fit_ar1: constant series");
    double theta = num / den;
    if (theta > 0.999) theta = 0.999;
    if (theta < -0.999) theta = -0.999;
    return {theta, stats.size()};
}

// Sample lag-1 autocorrelation (demeaned, full-variance denominator); the
// quantity summarized in reporting, distinct from the fit above
inline double acf1(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw std::domain_error("acf1: need at least 2 observations");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = x[i] - mean;
        den += c * c;
        if (i + 1 < n) num += c * (x[i + 1] - mean);
    }
    if (den == 0.0) throw std::domain_error("acf1: constant series");
    return num / den;
}

}  // namespace scct
