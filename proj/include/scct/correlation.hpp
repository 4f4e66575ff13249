#pragma once
// The four correlation-matrix generators used by the statistic-vector
// experiments, plus multivariate-normal sampling through their Cholesky factor.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "scct/linalg.hpp"
#include "scct/rng.hpp"

namespace scct {

enum class CorrModel { Exponential, Polynomial, Mixture, BlockDiagonal };

struct CorrelationSpec {
    CorrModel model = CorrModel::Exponential;
    std::size_t d = 0;
    double theta = 0.0;   // primary parameter
    double theta2 = 0.0;  // second mixture parameter
    std::size_t block_size = 10;

    static CorrelationSpec exponential(std::size_t d, double theta) {
        if (std::fabs(theta) >= 1.0)
            throw std::domain_error("exponential correlation requires |theta| < 1");
        return {CorrModel::Exponential, d, theta, 0.0, 0};
    }
    static CorrelationSpec polynomial(std::size_t d, double theta) {
        if (theta <= 0.0) throw std::domain_error("polynomial correlation requires theta > 0");
        return {CorrModel::Polynomial, d, theta, 0.0, 0};
    }
    static CorrelationSpec mixture(std::size_t d, double theta1, double theta2) {
        if (std::fabs(theta1) >= 1.0 || std::fabs(theta2) >= 1.0)
            throw std::domain_error("mixture correlation requires |theta| < 1");
        return {CorrModel::Mixture, d, theta1, theta2, 0};
    }
    static CorrelationSpec block_diagonal(std::size_t d, double theta, std::size_t block = 10) {
        if (theta < 0.0 || theta >= 1.0)
            throw std::domain_error("block-diagonal correlation requires theta in [0,1)");
        if (block == 0 || d % block != 0)
            throw std::domain_error("block size must divide the dimension");
        return {CorrModel::BlockDiagonal, d, theta, 0.0, block};
    }
};

inline Matrix build_correlation(const CorrelationSpec& spec) {
    if (spec.d == 0) throw std::domain_error("correlation dimension must be positive");
    const std::size_t d = spec.d;
    Matrix s(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double k = static_cast<double>(i > j ? i - j : j - i);
            double v;
            switch (spec.model) {
                case CorrModel::Exponential:
                    v = std::pow(spec.theta, k);
                    break;
                case CorrModel::Polynomial:
                    v = (i == j) ? 1.0 : 1.0 / (0.7 + std::pow(k, spec.theta));
                    break;
                case CorrModel::Mixture: {
                    // two independent exponentially decaying segments: the first
                    // floor(d/2) coordinates decay with theta, the rest with
                    // theta2, and cross-segment correlations are zero
                    const std::size_t half = spec.d / 2;
                    if (i < half && j < half)
                        v = std::pow(spec.theta, k);
                    else if (i >= half && j >= half)
                        v = std::pow(spec.theta2, k);
                    else
                        v = 0.0;
                    break;
                }
                case CorrModel::BlockDiagonal:
                    v = (i == j) ? 1.0
                        : (i / spec.block_size == j / spec.block_size) ? spec.theta
                                                                       : 0.0;
                    break;
                default:
                    throw std::logic_error("unknown correlation model");
            }
            s(i, j) = v;
        }
    }
    return s;
}

inline const char* corr_model_name(CorrModel m) {
    switch (m) {
        case CorrModel::Exponential:   return "exponential";
        case CorrModel::Polynomial:    return "polynomial";
        case CorrModel::Mixture:       return "mixture";
        case CorrModel::BlockDiagonal: return "block-diagonal";
    }
    return "?";
}

// Cholesky of the realized matrix; wraps the factorization error with the model name
inline Matrix correlation_cholesky(const CorrelationSpec& spec) {
    try {
        return cholesky_lower(build_correlation(spec));
    } catch (const std::domain_error& e) {
        throw std::domain_error(std::string("correlation model ") +
                                corr_model_name(spec.model) + ": " + e.what());
    }
}

// x = mean + L z, z iid standard normal
inline std::vector<double> sample_mvn_chol(const std::vector<double>& mean, const Matrix& chol,
                                           RngStream& rng) {
    const std::size_t d = chol.rows();
    if (mean.size() != d) throw std::invalid_argument("sample_mvn: dimension mismatch");
    std::vector<double> z(d), x(mean);
    for (std::size_t i = 0; i < d; ++i) z[i] = rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
        const double* row = chol.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
        x[i] += s;
    }
    return x;
}

inline std::vector<double> sample_mvn(const std::vector<double>& mean, const Matrix& corr,
                                      RngStream& rng) {
    return sample_mvn_chol(mean, cholesky_lower(corr), rng);
}

}  // namespace scct
