#pragma once
// Resampling-based critical values: simulate max |X| over stationary AR(1)
// paths, extract the (1-alpha) quantile, cache a (theta, d, alpha) table with
// bilinear interpolation in (theta, log d), and the rejection procedure built
// on the fitted theta of an observed statistic sequence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "scct/ar1.hpp"
#include "scct/procedures.hpp"
#include "scct/rng.hpp"

namespace scct {

struct CvTable {
    std::vector<double> theta_grid;   // ascending
    std::vector<std::size_t> d_grid;  // ascending
    std::vector<double> alpha_levels;
    // quantiles[it][id][ia]
    std::vector<std::vector<std::vector<double>>> quantiles;
    std::size_t replications = 0;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;

    static std::vector<double> default_theta_grid() {
        std::vector<double> g{-0.5, -0.25, 0.0};
        for (int i = 1; i <= 9; ++i) g.push_back(0.1 * i);
        g.push_back(0.95);
        g.push_back(0.99);
        return g;
    }
    static std::vector<std::size_t> default_d_grid() { return {100, 341, 500, 1000, 2500}; }
};

// (1-alpha) quantile (order statistic at index ceil((1-alpha) R)) of
// max_i |X_i| over R stationary AR(1) paths of length d
inline double simulate_max_quantile(double theta, std::size_t d, double alpha, std::size_t R,
                                    std::size_t burn_in, RngStream& rng) {
    if (std::fabs(theta) >= 1.0) throw std::domain_error("simulate_max_quantile: |theta| < 1");
    if (R < 1000) throw std::domain_error("simulate_max_quantile: R >= 1000 required");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must be in (0,1)");
    const double innov_sd = std::sqrt(1.0 - theta * theta);
    std::vector<double> maxima(R);
    for (std::size_t r = 0; r < R; ++r) {
        double x = rng.normal();
        for (std::size_t i = 0; i < burn_in; ++i) x = theta * x + innov_sd * rng.normal();
        double m = std::fabs(x);
        for (std::size_t i = 1; i < d; ++i) {
            x = theta * x + innov_sd * rng.normal();
            const double a = std::fabs(x);
            if (a > m) m = a;
        }
        maxima[r] = m;
    }
    // order statistic at ceil((1-alpha) R), 1-based
    std::size_t k = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(R)));
    if (k < 1) k = 1;
    if (k > R) k = R;
    std::nth_element(maxima.begin(), maxima.begin() + (k - 1), maxima.end());
    return maxima[k - 1];
}

// Simulates several alpha levels off one set of maxima (shared paths per cell)
inline std::vector<double> simulate_max_quantiles(double theta, std::size_t d,
                                                  const std::vector<double>& alphas,
                                                  std::size_t R, std::size_t burn_in,
                                                  RngStream& rng) {
    if (std::fabs(theta) >= 1.0) throw std::domain_error("simulate_max_quantiles: |theta| < 1");
    if (R < 1000) throw std::domain_error("simulate_max_quantiles: R >= 1000 required");
    const double innov_sd = std::sqrt(1.0 - theta * theta);
    std::vector<double> maxima(R);
    for (std::size_t r = 0; r < R; ++r) {
        double x = rng.normal();
        for (std::size_t i = 0; i < burn_in; ++i) x = theta * x + innov_sd * rng.normal();
        double m = std::fabs(x);
        for (std::size_t i = 1; i < d; ++i) {
            x = theta * x + innov_sd * rng.normal();
            const double a = std::fabs(x);
            if (a > m) m = a;
        }
        maxima[r] = m;
    }
    std::sort(maxima.begin(), maxima.end());
    std::vector<double> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw std::domain_error("alpha must be in (0,1)");
        std::size_t k = static_cast<std::size_t>(std::ceil((1.0 - a) * static_cast<double>(R)));
        if (k < 1) k = 1;
        if (k > R) k = R;
        out.push_back(maxima[k - 1]);
    }
    return out;
}

inline CvTable build_cv_table(const std::vector<double>& theta_grid,
                              const std::vector<std::size_t>& d_grid,
                              const std::vector<double>& alpha_levels, std::size_t R,
                              std::size_t burn_in, std::uint64_t seed) {
    if (theta_grid.empty() || d_grid.empty() || alpha_levels.empty())
        throw std::domain_error("build_cv_table: empty grid");
    CvTable t;
    t.theta_grid = theta_grid;
    t.d_grid = d_grid;
    t.alpha_levels = alpha_levels;
    t.replications = R;
    t.burn_in = burn_in;
    t.seed = seed;
    t.quantiles.assign(theta_grid.size(),
                       std::vector<std::vector<double>>(d_grid.size()));
    for (std::size_t it = 0; it < theta_grid.size(); ++it) {
        for (std::size_t id = 0; id < d_grid.size(); ++id) {
            // one stream per (theta, d) cell so cells can run in parallel
            RngStream rng(seed, it * d_grid.size() + id);
            t.quantiles[it][id] =
                simulate_max_quantiles(theta_grid[it], d_grid[id], alpha_levels, R, burn_in, rng);
        }
    }
    return t;
}

inline double interpolate_cv(const CvTable& t, double theta, std::size_t d, double alpha) {
    // locate alpha exactly
    std::size_t ia = t.alpha_levels.size();
    for (std::size_t i = 0; i < t.alpha_levels.size(); ++i)
        if (std::fabs(t.alpha_levels[i] - alpha) < 1e-12) { ia = i; break; }
    if (ia == t.alpha_levels.size())
        throw std::domain_error("interpolate_cv: alpha level not in table");
    if (theta < t.theta_grid.front() || theta > t.theta_grid.back())
        throw std::domain_error("interpolate_cv: theta outside table hull");
    const double ld = std::log(static_cast<double>(d));
    const double ld_lo = std::log(static_cast<double>(t.d_grid.front()));
    const double ld_hi = std::log(static_cast<double>(t.d_grid.back()));
    if (ld < ld_lo - 1e-12 || ld > ld_hi + 1e-12)
        throw std::domain_error("interpolate_cv: d outside table hull");

    const auto bracket = [](const std::vector<double>& g, double x) {
        std::size_t i = 0;
        while (i + 2 < g.size() && x > g[i + 1]) ++i;
        return i;
    };
    std::vector<double> ldg(t.d_grid.size());
    for (std::size_t i = 0; i < t.d_grid.size(); ++i)
        ldg[i] = std::log(static_cast<double>(t.d_grid[i]));

    const std::size_t it0 = bracket(t.theta_grid, theta);
    const std::size_t id0 = bracket(ldg, ld);
    const std::size_t it1 = std::min(it0 + 1, t.theta_grid.size() - 1);
    const std::size_t id1 = std::min(id0 + 1, ldg.size() - 1);
    const double tspan = t.theta_grid[it1] - t.theta_grid[it0];
    const double dspan = ldg[id1] - ldg[id0];
    const double wt = (tspan > 0.0) ? (theta - t.theta_grid[it0]) / tspan : 0.0;
    const double wd = (dspan > 0.0) ? (ld - ldg[id0]) / dspan : 0.0;
    const double q00 = t.quantiles[it0][id0][ia];
    const double q01 = t.quantiles[it0][id1][ia];
    const double q10 = t.quantiles[it1][id0][ia];
    const double q11 = t.quantiles[it1][id1][ia];
    return (1.0 - wt) * ((1.0 - wd) * q00 + wd * q01) + wt * ((1.0 - wd) * q10 + wd * q11);
}

// Reject H_i iff |X_i| exceeds the critical value simulated at the AR(1)
// coefficient fitted on the observed sequence. If a table is supplied the
// critical value is interpolated from it; otherwise simulated directly.
inline RejectionReport resampling_procedure(const std::vector<double>& stats, double alpha,
                                            const CvTable* table, RngStream& rng,
                                            std::size_t R = 100000, std::size_t burn_in = 0) {
    const Ar1Fit fit = fit_ar1(stats);
    const std::size_t d = stats.size();
    double cv;
    if (table != nullptr) {
        // the fit clamps to +/-0.999 but the table stops at its grid edge;
        // truncate the lookup into the hull rather than refusing the sequence
        const double th = std::clamp(fit.theta_hat, table->theta_grid.front(),
                                     table->theta_grid.back());
        cv = interpolate_cv(*table, th, d, alpha);
    } else
        cv = simulate_max_quantile(fit.theta_hat, d, alpha, R, burn_in, rng);
    RejectionReport r{"resampling", alpha, std::vector<char>(d, 0), std::vector<double>(d, 0.0),
                      false};
    for (std::size_t i = 0; i < d; ++i) {
        r.adjusted_values[i] = std::fabs(stats[i]) - cv;
        r.rejected[i] = (std::fabs(stats[i]) > cv);
    }
    detail::finalize(r);
    return r;
}

// ---------- JSON (de)serialization ----------

inline nlohmann::json cv_table_to_json(const CvTable& t) {
    nlohmann::json j;
    j["schema"] = "cv-table-v1";
    j["theta_grid"] = t.theta_grid;
    j["d_grid"] = t.d_grid;
    j["alpha_levels"] = t.alpha_levels;
    j["quantiles"] = t.quantiles;
    j["replications"] = t.replications;
    j["burn_in"] = t.burn_in;
    j["seed"] = t.seed;
    return j;
}

inline CvTable cv_table_from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j.at("schema") != "cv-table-v1")
        throw std::runtime_error("cv table file: unrecognized schema");
    CvTable t;
    j.at("theta_grid").get_to(t.theta_grid);
    j.at("d_grid").get_to(t.d_grid);
    j.at("alpha_levels").get_to(t.alpha_levels);
    j.at("quantiles").get_to(t.quantiles);
    j.at("replications").get_to(t.replications);
    j.at("burn_in").get_to(t.burn_in);
    j.at("seed").get_to(t.seed);
    return t;
}

}  // namespace scct
