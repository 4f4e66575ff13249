#pragma once
// High-frequency price data-generating processes: Heston diffusion at 1-second
// steps with optional drift/volatility bursts (flash crash within a day, or a
// persistent expansion spanning several days) plus microstructure noise.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scct/rng.hpp"

namespace scct {

inline constexpr std::size_t kSecondsPerDay = 23400;  // 6.5-hour session
inline constexpr std::size_t kMinutesPerDay = 390;
inline constexpr double kDaysPerYear = 252.0;

struct HestonParams {
    double kappa = 5.0;     // mean-reversion rate / year
    double theta_v = 0.0225;  // long-run variance / year
    double xi = 0.4;        // vol-of-vol
    double delta = -0.7071067811865476;  // leverage correlation, -sqrt(0.5)
    double mu_drift = 0.0;  // annualized drift

    void validate() const {
        if (kappa < 0.0 || theta_v < 0.0) throw std::domain_error("heston: kappa, theta_v >= 0");
        if (std::fabs(delta) > 1.0) throw std::domain_error("heston: |delta| <= 1 required");
        if (xi < 0.0) throw std::domain_error("heston: xi >= 0 required");
    }
};

enum class BurstKind { None, FlashCrash, PersistentExpansion };

struct BurstSpec {
    BurstKind kind = BurstKind::None;
    double tau_b = 0.0;      // burst time on the burst clock (fraction of the DGP span)
    double half_width = 0.0; // burst window half-duration on the same clock
    double alpha_b = 0.0;    // drift-burst rate, in (1/2, 1)
    double beta_b = 0.0;     // volatility-burst rate, in (0, 1/2)
    double a = 0.0;          // drift scale
    double b = 0.0;          // volatility scale

    static BurstSpec none() { return {}; }
    static BurstSpec flash_crash() {
        return {BurstKind::FlashCrash, 0.5, 0.025, 0.65, 0.4, 3.0, 0.15};
    }
    static BurstSpec persistent_expansion() {
        // clock runs over the whole multi-day span, peak at its end
        return {BurstKind::PersistentExpansion, 1.0, 1.0, 0.75, 0.4, 3.0, 0.15};
    }

    void validate() const {
        if (kind == BurstKind::None) return;
        if (!(alpha_b > 0.5 && alpha_b < 1.0))
            throw std::domain_error("burst: alpha_b in (1/2, 1) required");
        if (!(beta_b >= 0.0 && beta_b < 0.5))
            throw std::domain_error("burst: beta_b in [0, 1/2) required");
        if (half_width <= 0.0) throw std::domain_error("burst: half-duration must be positive");
    }
};

struct PricePath {
    double spacing_seconds = 1.0;
    double t0_epoch = 0.0;              // epoch seconds of the first observation
    std::vector<double> noisy;          // observed log prices, length n_days*23400 + 1
    std::vector<double> latent;         // latent log prices
    std::vector<double> spot_vol;       // annualized diffusive spot volatility
    std::vector<char> truth_minutes;    // per one-minute interval, length n_days*390
    std::size_t n_days = 1;

    std::size_t n_points() const { return noisy.size(); }
};

namespace detail {

// integral of sign(u - tau)/|tau - u|^alpha over [u0, u1] (integrable: alpha < 1)
inline double signed_singular_integral(double u0, double u1, double tau, double alpha) {
    const double om = 1.0 - alpha;
    if (u1 <= tau) return -(std::pow(tau - u0, om) - std::pow(tau - u1, om)) / om;
    if (u0 >= tau) return (std::pow(u1 - tau, om) - std::pow(u0 - tau, om)) / om;
    return (-std::pow(tau - u0, om) + std::pow(u1 - tau, om)) / om;
}

// integral of |tau - u|^(-2*beta) over [u0, u1] (integrable: beta < 1/2)
inline double squared_singular_integral(double u0, double u1, double tau, double beta) {
    const double tb = 1.0 - 2.0 * beta;
    if (u1 <= tau) return (std::pow(tau - u0, tb) - std::pow(tau - u1, tb)) / tb;
    if (u0 >= tau) return (std::pow(u1 - tau, tb) - std::pow(u0 - tau, tb)) / tb;
    return (std::pow(tau - u0, tb) + std::pow(u1 - tau, tb)) / tb;
}

}  // namespace detail

// Euler scheme on the 1-second grid over n_days consecutive sessions sharing
// one burst clock (u in [0,1] across the whole span). Full truncation keeps
// the variance non-negative in drift and diffusion terms.
inline PricePath simulate_price_path(const HestonParams& params, const BurstSpec& burst,
                                     double noise_gamma, std::size_t n_days, RngStream& rng) {
    params.validate();
    burst.validate();
    if (n_days == 0) throw std::domain_error("simulate: n_days >= 1 required");
    const std::size_t n = kSecondsPerDay;
    const std::size_t N = n_days * n;
    const double dt = 1.0 / (kDaysPerYear * static_cast<double>(n));
    const double sdt = std::sqrt(dt);
    const double leverage_orth = std::sqrt(1.0 - params.delta * params.delta);
    const double du = 1.0 / static_cast<double>(N);  // burst clock step
    const double drift_scale = dt / du;              // clock-time integral -> price units

    PricePath path;
    path.n_days = n_days;
    path.noisy.resize(N + 1);
    path.latent.resize(N + 1);
    path.spot_vol.resize(N + 1);
    path.truth_minutes.assign(n_days * kMinutesPerDay, 0);

    // initial variance from the stationary Gamma law
    double v;
    if (params.xi > 0.0 && params.kappa > 0.0) {
        const double shape = 2.0 * params.kappa * params.theta_v / (params.xi * params.xi);
        const double scale = params.xi * params.xi / (2.0 * params.kappa);
        v = rng.gamma(shape, scale);
    } else {
        v = params.theta_v;
    }

    path.latent[0] = 0.0;
    path.spot_vol[0] = std::sqrt(v);
    const bool expansion = (burst.kind == BurstKind::PersistentExpansion);

    for (std::size_t i = 0; i < N; ++i) {
        const double vp = (v > 0.0) ? v : 0.0;
        const double sv = std::sqrt(vp);
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double u0 = static_cast<double>(i) * du;
        const double u1 = static_cast<double>(i + 1) * du;
        const double um = (static_cast<double>(i) + 0.5) * du;

        double dP = params.mu_drift * dt + sv * z1 * sdt;
        const bool active =
            expansion ||
            (burst.kind == BurstKind::FlashCrash && std::fabs(um - burst.tau_b) <= burst.half_width);
        if (active) {
            double drift_int =
                detail::signed_singular_integral(u0, u1, burst.tau_b, burst.alpha_b);
            // the expansion trends upward toward its peak; the flash crash follows
            // the signed V-shape
            if (expansion) drift_int = -drift_int;
            dP += burst.a * drift_int * drift_scale;

            // burst volatility rides an independent Brownian increment; use the
            // exact root-mean-square of b*sqrt(theta_v)/|tau-u|^beta over the step
            const double msq =
                detail::squared_singular_integral(u0, u1, burst.tau_b, burst.beta_b) / du;
            const double sb = burst.b * std::sqrt(params.theta_v) * std::sqrt(msq);
            dP += sb * rng.normal() * sdt;
        }
        path.latent[i + 1] = path.latent[i] + dP;

        const double dB = params.delta * z1 + leverage_orth * z2;
        v += params.kappa * (params.theta_v - vp) * dt + params.xi * sv * dB * sdt;
        path.spot_vol[i + 1] = std::sqrt((v > 0.0) ? v : 0.0);
    }

    // microstructure noise: sd = n^{-1/2} * gamma * sigma_t with sigma_t in daily
    // volatility units; redrawn at every observation, scaled by the spot vol path
    const double noise_base =
        noise_gamma / (std::sqrt(static_cast<double>(n) + 1.0) * std::sqrt(kDaysPerYear));
    for (std::size_t i = 0; i <= N; ++i)
        path.noisy[i] = path.latent[i] + rng.normal() * noise_base * path.spot_vol[i];

    // truth mask: minute intervals overlapping the burst window
    if (burst.kind == BurstKind::FlashCrash) {
        const double lo = burst.tau_b - burst.half_width, hi = burst.tau_b + burst.half_width;
        for (std::size_t m = 0; m < path.truth_minutes.size(); ++m) {
            const double mu0 = static_cast<double>(m * 60) / static_cast<double>(N);
            const double mu1 = static_cast<double>((m + 1) * 60) / static_cast<double>(N);
            path.truth_minutes[m] = (mu1 > lo && mu0 < hi);
        }
    } else if (expansion) {
        for (auto& t : path.truth_minutes) t = 1;
    }
    return path;
}

inline PricePath simulate_heston_day(const HestonParams& params, const BurstSpec& burst,
                                     double noise_gamma, RngStream& rng) {
    if (burst.kind == BurstKind::PersistentExpansion)
        throw std::domain_error("persistent expansion spans multiple days; use "
                                "simulate_expansion_days");
    return simulate_price_path(params, burst, noise_gamma, 1, rng);
}

inline PricePath simulate_expansion_days(const HestonParams& params, const BurstSpec& burst,
                                         double noise_gamma, std::size_t n_days,
                                         RngStream& rng) {
    if (burst.kind != BurstKind::PersistentExpansion)
        throw std::domain_error("simulate_expansion_days requires a persistent-expansion burst");
    return simulate_price_path(params, burst, noise_gamma, n_days, rng);
}

// One day's slice (23401 points, sharing the boundary observation)
inline std::vector<double> day_slice(const std::vector<double>& prices, std::size_t day) {
    const std::size_t lo = day * kSecondsPerDay;
    if (lo + kSecondsPerDay >= prices.size())
        throw std::out_of_range("day_slice: day outside path");
    return {prices.begin() + lo, prices.begin() + lo + kSecondsPerDay + 1};
}

}  // namespace scct
