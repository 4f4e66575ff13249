#pragma once
// Noise-robust drift-burst statistic: pre-averaging, left-exponential kernel
// drift estimator, Parzen-weighted HAC variance, automatic lag selection, and
// the minute-grid statistic sequence with burn-in.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scct/heston.hpp"

namespace scct {

struct DriftBurstConfig {
    std::size_t k_n = 3;           // pre-averaging window
    double h_n = 600.0;            // mean bandwidth, seconds
    double bandwidth_ratio = 5.0;  // h'_n / h_n
    double grid_spacing = 60.0;    // statistic grid, seconds
    std::size_t burn_in = 49;      // grid points skipped at the session open

    double h_prime() const { return bandwidth_ratio * h_n; }
    void validate() const {
        if (k_n < 2) throw std::domain_error("driftburst: k_n >= 2 required");
        if (h_n <= 0.0) throw std::domain_error("driftburst: h_n > 0 required");
        if (bandwidth_ratio < 1.0) throw std::domain_error("driftburst: bandwidth ratio >= 1");
        if (grid_spacing <= 0.0) throw std::domain_error("driftburst: grid spacing > 0");
    }
};

struct DbStatSequence {
    std::vector<double> grid_seconds;  // session-relative evaluation times
    std::vector<double> stats;
    std::vector<double> mu_hat;        // drift component per point
    std::vector<double> sigma2_hat;    // variance component per point
    std::size_t lag_length = 0;        // L_n used for the day
    std::size_t variance_floor_count = 0;  // points where the HAC sum needed the floor
};

// Pre-averaged returns with weights g(j/k_n), g(x) = min(x, 1-x), over the
// window opening one return past the stamp: out[i] = sum_j g(j/k_n) r[i+j],
// j = 1..k_n-1, stamped at price time (i+1) * spacing.
inline std::vector<double> preaverage(const std::vector<double>& returns, std::size_t k_n) {
    if (k_n < 2) throw std::domain_error("preaverage: k_n >= 2 required");
    if (returns.size() < k_n) throw std::domain_error("preaverage: series shorter than window");
    const std::size_t m = returns.size() - k_n + 1;
    std::vector<double> g(k_n);  // g[j] for j = 1..k_n-1
    for (std::size_t j = 1; j < k_n; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(k_n);
        g[j] = std::min(x, 1.0 - x);
    }
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 1; j < k_n; ++j) s += g[j] * returns[i + j];
        out[i] = s;
    }
    return out;
}

// Parzen kernel weight on [0, 1]
inline double parzen_weight(double x) {
    const double a = std::fabs(x);
    if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
    if (a <= 1.0) { const double b = 1.0 - a; return 2.0 * b * b * b; }
    return 0.0;
}

// Newey-West-style automatic lag selection on the RAW 1-second returns:
// Q* = largest lag (up to ceil(4 (n/100)^{2/9})) whose autocorrelation
// t-ratio exceeds 1.96, floored at 0; L_n = Q* + 2 (k_n - 1).
inline std::size_t select_lag(const std::vector<double>& raw_returns, std::size_t k_n) {
    const std::size_t n = raw_returns.size();
    if (n < 10) throw std::domain_error("select_lag: need at least 10 returns");
    const double nd = static_cast<double>(n);
    const std::size_t max_lag =
        static_cast<std::size_t>(std::ceil(4.0 * std::pow(nd / 100.0, 2.0 / 9.0)));
    double mean = 0.0;
    for (double r : raw_returns) mean += r;
    mean /= nd;
    double var = 0.0;
    for (double r : raw_returns) var += (r - mean) * (r - mean);
    std::size_t qstar = 0;
    if (var > 0.0) {
        const double sqn = std::sqrt(nd);
        for (std::size_t L = 1; L <= max_lag && L < n; ++L) {
            double cov = 0.0;
            for (std::size_t i = 0; i + L < n; ++i)
                cov += (raw_returns[i] - mean) * (raw_returns[i + L] - mean);
            if (std::fabs(cov / var) * sqn > 1.96) qstar = L;
        }
    }
    return qstar + 2 * (k_n - 1);
}

namespace detail {

struct PreavgSeries {
    std::vector<double> rbar;  // rbar[i] stamped at second (i + 1)
    double spacing = 1.0;
};

inline PreavgSeries preavg_from_prices(const std::vector<double>& prices,
                                       const DriftBurstConfig& config) {
    if (prices.size() < config.k_n + 1)
        throw std::domain_error("drift-burst: price series shorter than pre-averaging window");
    std::vector<double> returns(prices.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) returns[i] = prices[i + 1] - prices[i];
    return {preaverage(returns, config.k_n), 1.0};
}

}  // namespace detail

// Direct kernel-sum evaluation at one time point (brute force; db_sequence
// computes the same quantities recursively)
inline double drift_estimate(const std::vector<double>& prices, double t_seconds,
                             const DriftBurstConfig& config) {
    config.validate();
    if (t_seconds < 1.0) throw std::domain_error("drift_estimate: t before data start");
    const auto pa = detail::preavg_from_prices(prices, config);
    double s = 0.0;
    for (std::size_t i = 0; i < pa.rbar.size(); ++i) {
        const double ti = static_cast<double>(i + 1);
        if (ti > t_seconds) break;
        s += std::exp(-(t_seconds - ti) / config.h_n) * pa.rbar[i];
    }
    return s / config.h_n;
}

inline double variance_estimate(const std::vector<double>& prices, double t_seconds,
                                const DriftBurstConfig& config, std::size_t lag_length) {
    config.validate();
    if (t_seconds < 1.0) throw std::domain_error("variance_estimate: t before data start");
    if (lag_length < 1) throw std::domain_error("variance_estimate: L_n >= 1 required");
    const auto pa = detail::preavg_from_prices(prices, config);
    const double hp = config.h_prime();
    double s = 0.0;
    for (std::size_t i = 0; i < pa.rbar.size(); ++i) {
        const double ti = static_cast<double>(i + 1);
        if (ti > t_seconds) break;
        const double k = std::exp(-(t_seconds - ti) / hp);
        s += k * k * pa.rbar[i] * pa.rbar[i];
        for (std::size_t L = 1; L <= lag_length && L <= i; ++L) {
            const double tj = static_cast<double>(i - L + 1);
            const double kj = std::exp(-(t_seconds - tj) / hp);
            s += 2.0 * parzen_weight(static_cast<double>(L) / static_cast<double>(lag_length)) *
                 k * kj * pa.rbar[i] * pa.rbar[i - L];
        }
    }
    double floor = 0.0;  // squared-term-only fallback
    if (s <= 0.0) {
        for (std::size_t i = 0; i < pa.rbar.size(); ++i) {
            const double ti = static_cast<double>(i + 1);
            if (ti > t_seconds) break;
            const double k = std::exp(-(t_seconds - ti) / hp);
            floor += k * k * pa.rbar[i] * pa.rbar[i];
        }
        s = floor;
    }
    if (s <= 0.0) throw std::domain_error("variance_estimate: non-positive variance after floor");
    return s / hp;
}

// Full statistic sequence for one day's prices (1-second spacing), evaluated
// on the minute grid past burn-in. Exact exponential-kernel recursion: per
// 1-second step every running sum decays and the newly available pre-averaged
// return is absorbed; O(n * L_n) total with no truncation error.
inline DbStatSequence db_sequence_day(const std::vector<double>& prices,
                                      const DriftBurstConfig& config) {
    config.validate();
    const std::size_t n = prices.size() - 1;  // returns on the 1-second grid
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = prices[i + 1] - prices[i];
    const std::size_t Ln = select_lag(raw, config.k_n);
    const auto rbar = preaverage(raw, config.k_n);
    const std::size_t m = rbar.size();

    const double hn = config.h_n, hp = config.h_prime();
    std::vector<double> w(Ln);
    for (std::size_t L = 1; L <= Ln; ++L)
        w[L - 1] = parzen_weight(static_cast<double>(L) / static_cast<double>(Ln));

    DbStatSequence seq;
    seq.lag_length = Ln;
    const double decay_mu = std::exp(-1.0 / hn);
    const double decay_sq = std::exp(-2.0 / hp);
    double Smu = 0.0, Ssq = 0.0;
    std::vector<double> cross(Ln, 0.0);  // cross[L-1]: sum keyed by the later index

    const std::size_t step = static_cast<std::size_t>(std::lround(config.grid_spacing));
    const double first_grid =
        config.grid_spacing * static_cast<double>(config.burn_in + 1);
    for (std::size_t tsec = 1; tsec <= n; ++tsec) {
        Smu *= decay_mu;
        Ssq *= decay_sq;
        for (std::size_t L = 0; L < Ln; ++L) cross[L] *= decay_sq;
        const std::size_t idx = tsec - 1;  // rbar[idx] is stamped at second tsec
        if (idx < m) {
            const double rr = rbar[idx];
            Smu += rr;
            Ssq += rr * rr;
            for (std::size_t L = 1; L <= Ln && L <= idx; ++L)
                cross[L - 1] += rbar[idx - L] * rr;
        }
        if (tsec % step == 0 && static_cast<double>(tsec) >= first_grid) {
            const double mu = Smu / hn;
            double s2 = Ssq;
            for (std::size_t L = 1; L <= Ln; ++L)
                s2 += 2.0 * w[L - 1] * std::exp(-static_cast<double>(L) / hp) * cross[L - 1];
            if (s2 <= 0.0) {
                s2 = Ssq;
                ++seq.variance_floor_count;
            }
            s2 /= hp;
            seq.grid_seconds.push_back(static_cast<double>(tsec));
            seq.mu_hat.push_back(mu);
            seq.sigma2_hat.push_back(s2);
            seq.stats.push_back(s2 > 0.0 ? std::sqrt(hn) * mu / std::sqrt(s2) : 0.0);
        }
    }
    return seq;
}

// Each day of a multi-day path is processed separately
inline std::vector<DbStatSequence> db_sequence(const PricePath& path,
                                               const DriftBurstConfig& config) {
    if (path.spacing_seconds != 1.0)
        throw std::domain_error("db_sequence: 1-second spacing required");
    std::vector<DbStatSequence> out;
    out.reserve(path.n_days);
    for (std::size_t day = 0; day < path.n_days; ++day)
        out.push_back(db_sequence_day(day_slice(path.noisy, day), config));
    return out;
}

// Truth labels aligned with one day's statistic grid
inline std::vector<char> truth_on_grid(const PricePath& path, std::size_t day,
                                       const DbStatSequence& seq) {
    std::vector<char> t(seq.stats.size(), 0);
    for (std::size_t g = 0; g < seq.grid_seconds.size(); ++g) {
        const std::size_t minute =
            static_cast<std::size_t>(std::lround(seq.grid_seconds[g] / 60.0));
        const std::size_t m = day * kMinutesPerDay + minute - 1;
        if (m < path.truth_minutes.size()) t[g] = path.truth_minutes[m];
    }
    return t;
}

}  // namespace scct
