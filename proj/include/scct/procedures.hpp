#pragma once
// FWER-controlling procedures: sequential Cauchy combination (SCC) and the
// benchmark methods (Bonferroni, Holm, Hochberg, Hommel, Gumbel threshold),
// plus the GCC/Simes global tests. Each returns a comparable RejectionReport.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "scct/dist.hpp"
#include "scct/pvalues.hpp"

namespace scct {

struct RejectionReport {
    std::string procedure;
    double alpha = 0.0;
    std::vector<char> rejected;          // per original index
    std::vector<double> adjusted_values; // decision statistic per original index
    bool global_rejected = false;

    std::size_t rejection_count() const {
        std::size_t n = 0;
        for (char r : rejected) n += (r != 0);
        return n;
    }
};

struct CauchyWeights {
    std::vector<double> w;

    static CauchyWeights uniform(std::size_t d) {
        if (d == 0) throw std::domain_error("weights require d >= 1");
        return {std::vector<double>(d, 1.0 / static_cast<double>(d))};
    }
};

namespace detail {

inline void check_weights(const PValueSet& pvals, const CauchyWeights& weights) {
    if (weights.w.size() != pvals.size())
        throw std::invalid_argument("weights/p-values length mismatch");
}

inline void finalize(RejectionReport& r) {
    r.global_rejected = std::any_of(r.rejected.begin(), r.rejected.end(),
                                    [](char c) { return c != 0; });
}

}  // namespace detail

// ---------- Cauchy combination ----------

inline double cauchy_transform(double p) { return std::tan((0.5 - p) * PI); }

inline double gcc_statistic(const PValueSet& pvals, const CauchyWeights& weights) {
    detail::check_weights(pvals, weights);
    double t = 0.0;
    for (std::size_t i = 0; i < pvals.size(); ++i)
        t += weights.w[i] * cauchy_transform(pvals.raw[i]);
    return t;
}

inline double gcc_pvalue(double t) {
    if (!std::isfinite(t)) throw std::domain_error("gcc_pvalue: non-finite statistic");
    return 0.5 - std::atan(t) / PI;
}

// Suffix statistics over ascending-ordered p-values with FIXED weights 1/d
// (never renormalized to the suffix); reject rank i iff the suffix Cauchy
// p-value is <= alpha. Rank-1 value equals the GCC p-value of the full set.
inline RejectionReport scc_procedure(const PValueSet& pvals, const CauchyWeights& weights,
                                     double alpha) {
    detail::check_weights(pvals, weights);
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must be in (0,1)");
    const std::size_t d = pvals.size();
    RejectionReport r{"scc", alpha, std::vector<char>(d, 0), std::vector<double>(d, 1.0), false};
    double suffix = 0.0;
    std::vector<double> ptilde(d);
    for (std::size_t rank = d; rank-- > 0;) {
        const std::size_t orig = pvals.order[rank];
        suffix += weights.w[orig] * cauchy_transform(pvals.raw[orig]);
        ptilde[rank] = gcc_pvalue(suffix);
    }
    for (std::size_t rank = 0; rank < d; ++rank) {
        const std::size_t orig = pvals.order[rank];
        r.adjusted_values[orig] = ptilde[rank];
        r.rejected[orig] = (ptilde[rank] <= alpha);
    }
    detail::finalize(r);
    return r;
}

// ---------- inequality-based step procedures ----------

inline RejectionReport bonferroni(const PValueSet& pvals, double alpha) {
    const std::size_t d = pvals.size();
    const double thr = alpha / static_cast<double>(d);
    RejectionReport r{"bonferroni", alpha, std::vector<char>(d, 0),
                      std::vector<double>(d, thr), false};
    for (std::size_t i = 0; i < d; ++i) r.rejected[i] = (pvals.raw[i] <= thr);
    detail::finalize(r);
    return r;
}

// step-down: scan ascending, stop at the first failure
inline RejectionReport holm(const PValueSet& pvals, double alpha) {
    const std::size_t d = pvals.size();
    RejectionReport r{"holm", alpha, std::vector<char>(d, 0), std::vector<double>(d, 0.0), false};
    bool stopped = false;
    for (std::size_t rank = 0; rank < d; ++rank) {
        const std::size_t orig = pvals.order[rank];
        const double thr = alpha / static_cast<double>(d - rank);
        r.adjusted_values[orig] = thr;
        if (!stopped && pvals.raw[orig] <= thr)
            r.rejected[orig] = 1;
        else
            stopped = true;
    }
    detail::finalize(r);
    return r;
}

// step-up: scan descending; once some p_(i) <= alpha/(d-i+1), reject it and all smaller
inline RejectionReport hochberg(const PValueSet& pvals, double alpha) {
    const std::size_t d = pvals.size();
    RejectionReport r{"hochberg", alpha, std::vector<char>(d, 0), std::vector<double>(d, 0.0),
                      false};
    std::size_t cut = 0;  // number of smallest ranks rejected
    for (std::size_t rank = d; rank-- > 0;) {
        const double thr = alpha / static_cast<double>(d - rank);
        r.adjusted_values[pvals.order[rank]] = thr;
        if (cut == 0 && pvals.sorted(rank) <= thr) cut = rank + 1;
    }
    for (std::size_t rank = 0; rank < cut; ++rank) r.rejected[pvals.order[rank]] = 1;
    detail::finalize(r);
    return r;
}

// j = largest i in 1..d such that p_(d-i+k) > k*alpha/i for all k=1..i;
// if no such i exists reject everything, else reject p_(i) <= alpha/j
inline RejectionReport hommel(const PValueSet& pvals, double alpha) {
    const std::size_t d = pvals.size();
    RejectionReport r{"hommel", alpha, std::vector<char>(d, 0), std::vector<double>(d, 0.0),
                      false};
    std::size_t j = 0;
    for (std::size_t i = d; i >= 1; --i) {
        bool all_above = true;
        for (std::size_t k = 1; k <= i; ++k) {
            // p_(d-i+k) with 1-based positions -> 0-based rank d-i+k-1
            if (pvals.sorted(d - i + k - 1) <=
                static_cast<double>(k) * alpha / static_cast<double>(i)) {
                all_above = false;
                break;
            }
        }
        if (all_above) { j = i; break; }
    }
    const double thr = (j == 0) ? 1.0 : alpha / static_cast<double>(j);
    for (std::size_t i = 0; i < d; ++i) {
        r.adjusted_values[i] = thr;
        r.rejected[i] = (j == 0) || (pvals.raw[i] <= thr);
    }
    detail::finalize(r);
    return r;
}

// ---------- Gumbel extreme-value threshold on |X_i| ----------

inline double gumbel_threshold(std::size_t d, double alpha) {
    if (d < 2) throw std::domain_error("gumbel threshold requires d >= 2");
    const double ld = std::log(static_cast<double>(d));
    const double s = 1.0 / std::sqrt(2.0 * ld);
    const double c = std::sqrt(2.0 * ld) - (std::log(PI) + std::log(ld)) / (2.0 * std::sqrt(2.0 * ld));
    return gumbel_quantile(1.0 - alpha) * s + c;
}

inline RejectionReport gumbel_procedure(const std::vector<double>& stats, double alpha) {
    const std::size_t d = stats.size();
    const double thr = gumbel_threshold(d, alpha);
    RejectionReport r{"gumbel", alpha, std::vector<char>(d, 0), std::vector<double>(d, 0.0),
                      false};
    for (std::size_t i = 0; i < d; ++i) {
        if (!std::isfinite(stats[i]))
            throw std::domain_error("statistic at index " + std::to_string(i) + " is not finite");
        r.adjusted_values[i] = std::fabs(stats[i]) - thr;
        r.rejected[i] = (std::fabs(stats[i]) > thr);
    }
    detail::finalize(r);
    return r;
}

// ---------- Simes global test ----------

inline bool simes_global(const PValueSet& pvals, double alpha) {
    const std::size_t d = pvals.size();
    for (std::size_t rank = 0; rank < d; ++rank) {
        const double thr = static_cast<double>(rank + 1) * alpha / static_cast<double>(d);
        if (pvals.sorted(rank) <= thr) return true;
    }
    return false;
}

}  // namespace scct
