#pragma once
// Raw p-value computation and the ordered p-value container shared by all
// controlling procedures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "scct/dist.hpp"

namespace scct {

inline constexpr double kPClampLo = 1e-15;
inline constexpr double kPClampHi = 1.0 - 1e-15;

struct PValueSet {
    std::vector<double> raw;        // clamped into (0,1), original order
    std::vector<std::size_t> order; // rank -> original index, ascending p, stable

    std::size_t size() const { return raw.size(); }
    double sorted(std::size_t rank) const { return raw[order[rank]]; }
};

inline PValueSet make_pvalue_set(std::vector<double> raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]))
            throw std::domain_error("p-value at index " + std::to_string(i) + " is not finite");
        raw[i] = std::clamp(raw[i], kPClampLo, kPClampHi);
    }
    PValueSet ps;
    ps.order.resize(raw.size());
    std::iota(ps.order.begin(), ps.order.end(), std::size_t{0});
    // stable: ties keep original index order
    std::stable_sort(ps.order.begin(), ps.order.end(),
                     [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
    ps.raw = std::move(raw);
    return ps;
}

inline PValueSet two_sided_pvalues(const std::vector<double>& stats,
                                   const DistributionKind& null) {
    std::vector<double> p(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        if (!std::isfinite(stats[i]))
            throw std::domain_error("statistic at index " + std::to_string(i) +
                                    " is not finite");
        p[i] = 2.0 * sf(null, std::fabs(stats[i]));
    }
    return make_pvalue_set(p);
}

}  // namespace scct
