#pragma once
// Factor-model alpha testing: per-asset OLS with intercept, alpha t-statistics
// and p-values, the screening procedure with its power-enhancement component
// J0, and the calibrated factor-model DGP.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "scct/correlation.hpp"
#include "scct/dist.hpp"
#include "scct/linalg.hpp"
#include "scct/procedures.hpp"
#include "scct/pvalues.hpp"
#include "scct/rng.hpp"

namespace scct {

struct FactorPanel {
    Matrix y;  // T x d excess returns, percent per month
    Matrix f;  // T x K factors
    std::vector<std::string> asset_labels;
    std::vector<std::string> period_labels;

    std::size_t T() const { return y.rows(); }
    std::size_t d() const { return y.cols(); }
    std::size_t K() const { return f.cols(); }

    void validate() const {
        if (f.rows() != y.rows()) throw std::domain_error("panel: y/f row mismatch");
        if (T() <= K() + 1) throw std::domain_error("panel: T > K + 1 required");
    }
};

struct AlphaFit {
    std::vector<double> a_hat;
    Matrix b_hat;  // d x K
    std::vector<double> se_a;
    Matrix resid;  // T x d
    std::size_t dof = 0;  // T - K - 1
    std::vector<char> degenerate;  // se below threshold; p-value forced to 1
};

inline AlphaFit fit_alphas(const FactorPanel& panel) {
    panel.validate();
    const std::size_t T = panel.T(), d = panel.d(), K = panel.K();
    const std::size_t p = K + 1;

    // shared design X = [1 f]; factor Gram matrix once for all assets
    Matrix xtx(p, p);
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<double> row(p);
        row[0] = 1.0;
        for (std::size_t k = 0; k < K; ++k) row[k + 1] = panel.f(t, k);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) xtx(a, b) += row[a] * row[b];
    }
    Matrix xtx_inv;
    try {
        xtx_inv = inverse_spd(xtx);
    } catch (const std::domain_error&) {
        throw std::domain_error("fit_alphas: rank-deficient regressor matrix");
    }

    AlphaFit fit;
    fit.a_hat.resize(d);
    fit.b_hat = Matrix(d, K);
    fit.se_a.resize(d);
    fit.resid = Matrix(T, d);
    fit.dof = T - K - 1;
    fit.degenerate.assign(d, 0);

    std::vector<double> xty(p), beta(p);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(xty.begin(), xty.end(), 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const double yt = panel.y(t, j);
            xty[0] += yt;
            for (std::size_t k = 0; k < K; ++k) xty[k + 1] += panel.f(t, k) * yt;
        }
        for (std::size_t a = 0; a < p; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < p; ++b) s += xtx_inv(a, b) * xty[b];
            beta[a] = s;
        }
        fit.a_hat[j] = beta[0];
        for (std::size_t k = 0; k < K; ++k) fit.b_hat(j, k) = beta[k + 1];
        double rss = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            double yhat = beta[0];
            for (std::size_t k = 0; k < K; ++k) yhat += beta[k + 1] * panel.f(t, k);
            const double e = panel.y(t, j) - yhat;
            fit.resid(t, j) = e;
            rss += e * e;
        }
        const double s2 = rss / static_cast<double>(fit.dof);
        fit.se_a[j] = std::sqrt(s2 * xtx_inv(0, 0));
        if (fit.se_a[j] <= 1e-12) fit.degenerate[j] = 1;
    }
    return fit;
}

inline std::vector<double> alpha_tstats(const AlphaFit& fit) {
    std::vector<double> t(fit.a_hat.size());
    for (std::size_t j = 0; j < t.size(); ++j)
        t[j] = fit.degenerate[j] ? 0.0 : fit.a_hat[j] / fit.se_a[j];
    return t;
}

// Two-sided Student-t p-values with dof T - K - 1; degenerate-se assets get 1
inline PValueSet alpha_pvalues(const AlphaFit& fit) {
    const DistributionKind tnu = DistributionKind::student_t(static_cast<int>(fit.dof));
    std::vector<double> p(fit.a_hat.size());
    for (std::size_t j = 0; j < p.size(); ++j)
        p[j] = fit.degenerate[j] ? 1.0
                                 : 2.0 * sf(tnu, std::fabs(fit.a_hat[j] / fit.se_a[j]));
    return make_pvalue_set(p);
}

inline double screening_threshold(double C, std::size_t T, std::size_t d) {
    return C * std::log(std::log(static_cast<double>(T))) *
           std::sqrt(std::log(static_cast<double>(d)));
}

struct ScreeningResult {
    RejectionReport report;
    double J0 = 0.0;
};

// Screening set S = { j : |a_j| / sqrt(nu_j) > delta } with the asymptotic
// variance estimate nu_j = sigma^2_{u,j} / T, and J0 = sqrt(d) * sum over S
// of a_j^2 / nu_j
inline ScreeningResult screening_procedure(const AlphaFit& fit, double C, std::size_t T,
                                           std::size_t d) {
    if (C <= 0.0) throw std::domain_error("screening: C > 0 required");
    if (fit.a_hat.size() != d) throw std::invalid_argument("screening: dimension mismatch");
    const double delta = screening_threshold(C, T, d);
    ScreeningResult out;
    out.report = RejectionReport{"screening", 0.0, std::vector<char>(d, 0),
                                 std::vector<double>(d, 0.0), false};
    for (std::size_t j = 0; j < d; ++j) {
        if (fit.degenerate[j]) continue;
        // residual variance recovered from the stored residuals
        double rss = 0.0;
        for (std::size_t t = 0; t < fit.resid.rows(); ++t)
            rss += fit.resid(t, j) * fit.resid(t, j);
        const double sigma2_u = rss / static_cast<double>(fit.dof);
        const double nu = sigma2_u / static_cast<double>(T);
        if (nu <= 0.0) continue;
        const double stat = std::fabs(fit.a_hat[j]) / std::sqrt(nu);
        out.report.adjusted_values[j] = stat - delta;
        if (stat > delta) {
            out.report.rejected[j] = 1;
            out.J0 += fit.a_hat[j] * fit.a_hat[j] / nu;
        }
    }
    out.J0 *= std::sqrt(static_cast<double>(d));
    detail::finalize(out.report);
    return out;
}

// ---------- calibrated DGP ----------

struct CalibratedDgp {
    std::vector<double> mu_B;  // loading means, length K
    Matrix sigma_B;            // K x K
    std::vector<double> mu_f;  // factor means
    Matrix sigma_f;            // K x K
    Matrix sigma_u;            // d x d idiosyncratic covariance
    double signal_alpha = 0.5;
    std::string name;

    std::size_t K() const { return mu_B.size(); }
    std::size_t d() const { return sigma_u.rows(); }
};

inline std::size_t signal_count(std::size_t d) {
    return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(d), 0.4)));
}

struct SimulatedPanel {
    FactorPanel panel;
    std::vector<char> truth;
};

// y_it = a_i + b_i' f_t + u_it with loadings, factors and noises drawn from
// independent multivariate normal laws; alternative alphas a_i = signal_alpha
// for i <= floor(d^0.4)
inline SimulatedPanel simulate_panel(const CalibratedDgp& dgp, std::size_t T, std::size_t d,
                                     bool with_signals, RngStream& rng) {
    if (d != dgp.d()) throw std::invalid_argument("simulate_panel: dimension mismatch");
    const std::size_t K = dgp.K();
    Matrix chol_B, chol_f, chol_u;
    try {
        chol_B = cholesky_lower(dgp.sigma_B);
        chol_f = cholesky_lower(dgp.sigma_f);
        chol_u = cholesky_lower(dgp.sigma_u);
    } catch (const std::domain_error& e) {
        throw std::domain_error(std::string("simulate_panel: covariance not PSD: ") + e.what());
    }

    SimulatedPanel out;
    out.truth.assign(d, 0);
    std::vector<double> a(d, 0.0);
    if (with_signals) {
        const std::size_t s = signal_count(d);
        for (std::size_t i = 0; i < s; ++i) {
            a[i] = dgp.signal_alpha;
            out.truth[i] = 1;
        }
    }

    Matrix B(d, K);
    for (std::size_t i = 0; i < d; ++i) {
        const auto bi = sample_mvn_chol(dgp.mu_B, chol_B, rng);
        for (std::size_t k = 0; k < K; ++k) B(i, k) = bi[k];
    }
    out.panel.f = Matrix(T, K);
    out.panel.y = Matrix(T, d);
    const std::vector<double> zero_d(d, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const auto ft = sample_mvn_chol(dgp.mu_f, chol_f, rng);
        for (std::size_t k = 0; k < K; ++k) out.panel.f(t, k) = ft[k];
        const auto ut = sample_mvn_chol(zero_d, chol_u, rng);
        for (std::size_t i = 0; i < d; ++i) {
            double v = a[i] + ut[i];
            for (std::size_t k = 0; k < K; ++k) v += B(i, k) * ft[k];
            out.panel.y(t, i) = v;
        }
    }
    return out;
}

// Fit the DGP parameters from an observed panel: loadings law from the
// cross-section of per-asset OLS estimates, factor law from sample moments,
// idiosyncratic covariance from the OLS residuals (ridge jitter if needed)
inline CalibratedDgp calibrate_dgp(const FactorPanel& panel, const std::string& name = "") {
    const AlphaFit fit = fit_alphas(panel);
    const std::size_t T = panel.T(), d = panel.d(), K = panel.K();
    CalibratedDgp dgp;
    dgp.name = name;
    dgp.mu_B.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t j = 0; j < d; ++j) dgp.mu_B[k] += fit.b_hat(j, k);
        dgp.mu_B[k] /= static_cast<double>(d);
    }
    dgp.sigma_B = Matrix(K, K);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b)
                dgp.sigma_B(a, b) += (fit.b_hat(j, a) - dgp.mu_B[a]) *
                                     (fit.b_hat(j, b) - dgp.mu_B[b]) /
                                     static_cast<double>(d - 1);
    dgp.mu_f.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t t = 0; t < T; ++t) dgp.mu_f[k] += panel.f(t, k);
        dgp.mu_f[k] /= static_cast<double>(T);
    }
    dgp.sigma_f = Matrix(K, K);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b)
                dgp.sigma_f(a, b) += (panel.f(t, a) - dgp.mu_f[a]) *
                                     (panel.f(t, b) - dgp.mu_f[b]) /
                                     static_cast<double>(T - 1);
    dgp.sigma_u = Matrix(d, d);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t a = 0; a < d; ++a) {
            const double ra = fit.resid(t, a);
            for (std::size_t b = 0; b < d; ++b)
                dgp.sigma_u(a, b) += ra * fit.resid(t, b) / static_cast<double>(T - 1);
        }
    // ensure the residual covariance factors; tiny ridge if it is borderline
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            cholesky_lower(dgp.sigma_u);
            break;
        } catch (const std::domain_error&) {
            if (attempt == 3) throw;
            for (std::size_t i = 0; i < d; ++i) dgp.sigma_u(i, i) += 1e-8 * dgp.sigma_u(i, i) + 1e-10;
        }
    }
    return dgp;
}

// ---------- JSON (de)serialization ----------

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    const std::size_t r = j.size();
    if (r == 0) return Matrix();
    const std::size_t c = j.at(0).size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<double>();
    return m;
}

}  // namespace detail

inline nlohmann::json dgp_to_json(const CalibratedDgp& dgp) {
    nlohmann::json j;
    j["schema"] = "calibrated-dgp-v1";
    j["name"] = dgp.name;
    j["mu_B"] = dgp.mu_B;
    j["sigma_B"] = detail::matrix_to_json(dgp.sigma_B);
    j["mu_f"] = dgp.mu_f;
    j["sigma_f"] = detail::matrix_to_json(dgp.sigma_f);
    j["sigma_u"] = detail::matrix_to_json(dgp.sigma_u);
    j["signal_alpha"] = dgp.signal_alpha;
    return j;
}

inline CalibratedDgp dgp_from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j.at("schema") != "calibrated-dgp-v1")
        throw std::runtime_error("calibrated DGP file: unrecognized schema");
    CalibratedDgp dgp;
    dgp.name = j.value("name", "");
    j.at("mu_B").get_to(dgp.mu_B);
    dgp.sigma_B = detail::matrix_from_json(j.at("sigma_B"));
    j.at("mu_f").get_to(dgp.mu_f);
    dgp.sigma_f = detail::matrix_from_json(j.at("sigma_f"));
    dgp.sigma_u = detail::matrix_from_json(j.at("sigma_u"));
    dgp.signal_alpha = j.value("signal_alpha", 0.5);
    return dgp;
}

}  // namespace scct
