#pragma once
// Distribution functions: standard normal, Student-t, standard Cauchy, standard Gumbel.
// Tail precision matters here: tiny p-values feed tan transforms downstream.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace scct {

inline constexpr double PI = 3.141592653589793238462643383279502884;

enum class Dist { StdNormal, StudentT, StdCauchy, StdGumbel };

struct DistributionKind {
    Dist tag = Dist::StdNormal;
    int nu = 0;  // degrees of freedom, Student-t only

    static DistributionKind normal() { return {Dist::StdNormal, 0}; }
    static DistributionKind student_t(int nu) {
        if (nu < 1) throw std::domain_error("student-t requires nu >= 1");
        return {Dist::StudentT, nu};
    }
    static DistributionKind cauchy() { return {Dist::StdCauchy, 0}; }
    static DistributionKind gumbel() { return {Dist::StdGumbel, 0}; }
};

// ---------- standard normal ----------

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// upper tail, accurate for large x
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

// Wichura's AS241 (PPND16): |error| ~ 1e-16 over (0,1)
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

// ---------- regularized incomplete beta (for Student-t) ----------

namespace detail {

inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) break;
    }
    return h;
}

}  // namespace detail

inline double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double front = std::exp(lbeta + a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// ---------- Student-t ----------

inline double student_t_cdf(double x, int nu) {
    if (nu < 1) throw std::domain_error("student_t_cdf: nu >= 1 required");
    const double v = static_cast<double>(nu);
    const double ib = incbeta(v / 2.0, 0.5, v / (v + x * x));
    return (x >= 0.0) ? 1.0 - 0.5 * ib : 0.5 * ib;
}

inline double student_t_sf(double x, int nu) { return student_t_cdf(-x, nu); }

inline double student_t_quantile(double p, int nu) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("student_t_quantile: p outside (0,1)");
    // bracketing + bisection/secant hybrid on the monotone CDF
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, nu) > p) lo *= 2.0;
    while (student_t_cdf(hi, nu) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, nu) < p) lo = mid; else hi = mid;
        if (hi - lo < 1e-13 * (1.0 + std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// ---------- standard Cauchy ----------

inline double cauchy_cdf(double x) { return 0.5 + std::atan(x) / PI; }
inline double cauchy_sf(double x) { return 0.5 - std::atan(x) / PI; }
inline double cauchy_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("cauchy_quantile: p outside (0,1)");
    return std::tan(PI * (p - 0.5));
}

// ---------- standard Gumbel ----------

inline double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }
inline double gumbel_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gumbel_quantile: p outside (0,1)");
    return -std::log(-std::log(p));
}

// ---------- dispatch ----------

inline double cdf(const DistributionKind& kind, double x) {
    if (!std::isfinite(x)) throw std::domain_error("cdf: non-finite argument");
    switch (kind.tag) {
        case Dist::StdNormal: return normal_cdf(x);
        case Dist::StudentT:  return student_t_cdf(x, kind.nu);
        case Dist::StdCauchy: return cauchy_cdf(x);
        case Dist::StdGumbel: return gumbel_cdf(x);
    }
    throw std::logic_error("cdf: unknown kind");
}

inline double sf(const DistributionKind& kind, double x) {
    if (!std::isfinite(x)) throw std::domain_error("sf: non-finite argument");
    switch (kind.tag) {
        case Dist::StdNormal: return normal_sf(x);
        case Dist::StudentT:  return student_t_sf(x, kind.nu);
        case Dist::StdCauchy: return cauchy_sf(x);
        case Dist::StdGumbel: return 1.0 - gumbel_cdf(x);
    }
    throw std::logic_error("sf: unknown kind");
}

inline double quantile(const DistributionKind& kind, double p) {
    switch (kind.tag) {
        case Dist::StdNormal: return normal_quantile(p);
        case Dist::StudentT:  return student_t_quantile(p, kind.nu);
        case Dist::StdCauchy: return cauchy_quantile(p);
        case Dist::StdGumbel: return gumbel_quantile(p);
    }
    throw std::logic_error("quantile: unknown kind");
}

}  // namespace scct
