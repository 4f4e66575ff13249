// Factor-model alpha testing: OLS fit against a hand-worked fixture, t/p
// values, the screening rule, the calibrated DGP round trip, and panel CSV
// ingestion.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "scct/alphatest.hpp"
#include "scct/io.hpp"

namespace {

using namespace scct;

FactorPanel tiny_panel() {
    // single factor 1..5, y = 1.05 + 0.99 f + residuals
    FactorPanel p;
    p.y = Matrix(5, 1);
    p.f = Matrix(5, 1);
    const double ys[5] = {2.1, 2.9, 4.2, 4.8, 6.1};
    for (int t = 0; t < 5; ++t) {
        p.y(t, 0) = ys[t];
        p.f(t, 0) = t + 1.0;
    }
    return p;
}

TEST(AlphaFit, HandWorkedSingleFactor) {
    const auto fit = fit_alphas(tiny_panel());
    ASSERT_EQ(fit.a_hat.size(), 1u);
    EXPECT_NEAR(fit.a_hat[0], 1.05, 1e-12);
    EXPECT_NEAR(fit.b_hat(0, 0), 0.99, 1e-12);
    EXPECT_NEAR(fit.se_a[0], 0.1980740602, 1e-9);
    EXPECT_EQ(fit.dof, 3u);
    EXPECT_EQ(fit.degenerate[0], 0);
    // residuals: 0.06, -0.13, 0.18, -0.21, 0.10
    EXPECT_NEAR(fit.resid(0, 0), 0.06, 1e-12);
    EXPECT_NEAR(fit.resid(3, 0), -0.21, 1e-12);

    const auto t = alpha_tstats(fit);
    EXPECT_NEAR(t[0], 1.05 / 0.1980740602, 1e-8);
    const auto pv = alpha_pvalues(fit);
    const DistributionKind t3 = DistributionKind::student_t(3);
    EXPECT_NEAR(pv.raw[0], 2.0 * sf(t3, t[0]), 1e-12);
}

TEST(AlphaFit, NoiselessPanelIsDegenerate) {
    FactorPanel p = tiny_panel();
    for (int t = 0; t < 5; ++t) p.y(t, 0) = 2.0 * p.f(t, 0);  // exact fit, zero alpha
    const auto fit = fit_alphas(p);
    EXPECT_NEAR(fit.a_hat[0], 0.0, 1e-10);
    EXPECT_EQ(fit.degenerate[0], 1);
    EXPECT_DOUBLE_EQ(alpha_tstats(fit)[0], 0.0);
    EXPECT_DOUBLE_EQ(alpha_pvalues(fit).raw[0], kPClampHi);  // forced to 1, clamped
}

TEST(AlphaFit, ValidationErrors) {
    FactorPanel p = tiny_panel();
    p.f = Matrix(4, 1);
    EXPECT_THROW(fit_alphas(p), std::domain_error);  // row mismatch
    FactorPanel q;
    q.y = Matrix(2, 1);
    q.f = Matrix(2, 1);
    EXPECT_THROW(fit_alphas(q), std::domain_error);  // T <= K + 1
}

TEST(Screening, ThresholdAndSignalCount) {
    EXPECT_NEAR(screening_threshold(1.06, 240, 100), 3.869810, 1e-5);
    EXPECT_EQ(signal_count(100), 6u);
    EXPECT_EQ(signal_count(25), 3u);
}

TEST(Screening, SelectsLargeStandardizedAlphas) {
    // panel with a blatant alpha on asset 0 and none on asset 1
    RngStream rng(71, 0);
    const std::size_t T = 240;
    FactorPanel p;
    p.y = Matrix(T, 2);
    p.f = Matrix(T, 1);
    std::vector<double> f(T), e(T);
    for (std::size_t t = 0; t < T; ++t) {
        f[t] = rng.normal();
        e[t] = 0.5 * rng.normal();
    }
    // orthogonalize the second asset's noise against [1, f] so its fitted
    // alpha is exactly zero
    double fm = 0.0, em = 0.0;
    for (std::size_t t = 0; t < T; ++t) { fm += f[t]; em += e[t]; }
    fm /= T; em /= T;
    double sfe = 0.0, sff = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        sfe += (f[t] - fm) * (e[t] - em);
        sff += (f[t] - fm) * (f[t] - fm);
    }
    for (std::size_t t = 0; t < T; ++t) e[t] -= em + (sfe / sff) * (f[t] - fm);
    for (std::size_t t = 0; t < T; ++t) {
        p.f(t, 0) = f[t];
        p.y(t, 0) = 2.0 + 0.8 * f[t] + 0.5 * rng.normal();
        p.y(t, 1) = 0.7 * f[t] + e[t];
    }
    const auto fit = fit_alphas(p);
    const auto res = screening_procedure(fit, 1.06, T, 2);
    EXPECT_TRUE(res.report.rejected[0]);
    EXPECT_FALSE(res.report.rejected[1]);
    EXPECT_GT(res.J0, 0.0);
    // an absurd constant empties the screening set
    const auto none = screening_procedure(fit, 1e6, T, 2);
    EXPECT_EQ(none.report.rejection_count(), 0u);
    EXPECT_DOUBLE_EQ(none.J0, 0.0);
    EXPECT_THROW(screening_procedure(fit, 0.0, T, 2), std::domain_error);
    EXPECT_THROW(screening_procedure(fit, 1.06, T, 5), std::invalid_argument);
}

CalibratedDgp small_dgp() {
    CalibratedDgp dgp;
    dgp.name = "toy";
    dgp.mu_B = {1.0, -0.3};
    dgp.sigma_B = Matrix(2, 2);
    dgp.sigma_B(0, 0) = 0.09; dgp.sigma_B(1, 1) = 0.04; dgp.sigma_B(0, 1) = dgp.sigma_B(1, 0) = 0.02;
    dgp.mu_f = {0.5, 0.2};
    dgp.sigma_f = Matrix(2, 2);
    dgp.sigma_f(0, 0) = 4.0; dgp.sigma_f(1, 1) = 2.0; dgp.sigma_f(0, 1) = dgp.sigma_f(1, 0) = 0.7;
    const std::size_t d = 40;
    dgp.sigma_u = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            dgp.sigma_u(i, j) = (i == j) ? 1.0 : 0.2 * std::pow(0.5, std::abs(int(i) - int(j)));
    dgp.signal_alpha = 0.5;
    return dgp;
}

TEST(CalibratedDgpModel, SimulatedPanelShapeAndTruth) {
    const auto dgp = small_dgp();
    RngStream rng(72, 0);
    const auto sp = simulate_panel(dgp, 120, 40, true, rng);
    EXPECT_EQ(sp.panel.T(), 120u);
    EXPECT_EQ(sp.panel.d(), 40u);
    EXPECT_EQ(sp.panel.K(), 2u);
    const std::size_t s = signal_count(40);  // floor(40^0.4) = 4
    for (std::size_t i = 0; i < 40; ++i)
        EXPECT_EQ(static_cast<bool>(sp.truth[i]), i < s);
    RngStream rng2(72, 1);
    const auto null_sp = simulate_panel(dgp, 120, 40, false, rng2);
    for (char t : null_sp.truth) EXPECT_EQ(t, 0);
    EXPECT_THROW(simulate_panel(dgp, 120, 30, false, rng2), std::invalid_argument);
}

TEST(CalibratedDgpModel, CalibrationRecoversParameters) {
    const auto dgp = small_dgp();
    RngStream rng(73, 0);
    const auto sp = simulate_panel(dgp, 3000, 40, false, rng);
    const auto back = calibrate_dgp(sp.panel, "refit");
    ASSERT_EQ(back.K(), 2u);
    ASSERT_EQ(back.d(), 40u);
    // factor law from 3000 sample months
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(back.mu_f[k], dgp.mu_f[k], 0.1);
    EXPECT_NEAR(back.sigma_f(0, 0), 4.0, 0.3);
    EXPECT_NEAR(back.sigma_f(1, 1), 2.0, 0.2);
    EXPECT_NEAR(back.sigma_f(0, 1), 0.7, 0.2);
    // loading law from the cross-section of 40 fitted loadings
    EXPECT_NEAR(back.mu_B[0], 1.0, 0.2);
    EXPECT_NEAR(back.mu_B[1], -0.3, 0.2);
    EXPECT_NEAR(back.sigma_B(0, 0), 0.09, 0.08);
    // idiosyncratic covariance diagonal
    double diag = 0.0;
    for (std::size_t i = 0; i < 40; ++i) diag += back.sigma_u(i, i);
    EXPECT_NEAR(diag / 40.0, 1.0, 0.1);
}

TEST(CalibratedDgpModel, JsonRoundTrip) {
    const auto dgp = small_dgp();
    const auto back = dgp_from_json(dgp_to_json(dgp));
    EXPECT_EQ(back.name, "toy");
    EXPECT_EQ(back.mu_B, dgp.mu_B);
    EXPECT_EQ(back.mu_f, dgp.mu_f);
    EXPECT_DOUBLE_EQ(back.signal_alpha, 0.5);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_DOUBLE_EQ(back.sigma_B(i, j), dgp.sigma_B(i, j));
            EXPECT_DOUBLE_EQ(back.sigma_f(i, j), dgp.sigma_f(i, j));
        }
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = 0; j < 40; ++j)
            ASSERT_DOUBLE_EQ(back.sigma_u(i, j), dgp.sigma_u(i, j));
    nlohmann::json bad = dgp_to_json(dgp);
    bad["schema"] = "nope";
    EXPECT_THROW(dgp_from_json(bad), std::runtime_error);
}

// ---------- panel CSV ingestion ----------

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = testing::TempDir() + name;
    std::ofstream out(path);
    out << content;
    return path;
}

TEST(PanelCsv, ParsesAndSubtractsRiskFree) {
    const std::string path = write_temp(
        "panel_ok.csv",
        "Period,Mkt-RF,SMB,RF,P1,P2\n"
        "202001,1.5,0.3,0.1,2.0,-0.5\n"
        "202002,-0.8,0.1,0.1,1.1,0.4\n"
        "202003,0.2,-0.4,0.2,0.0,0.9\n"
        "202004,0.9,0.2,0.2,0.5,0.1\n");
    const auto panel = ingest_panel_csv(path);
    EXPECT_EQ(panel.T(), 4u);
    EXPECT_EQ(panel.K(), 2u);
    EXPECT_EQ(panel.d(), 2u);
    EXPECT_EQ(panel.asset_labels[0], "P1");
    EXPECT_EQ(panel.period_labels[2], "202003");
    EXPECT_DOUBLE_EQ(panel.f(0, 0), 1.5);
    EXPECT_DOUBLE_EQ(panel.f(2, 1), -0.4);
    EXPECT_DOUBLE_EQ(panel.y(0, 0), 1.9);   // 2.0 - 0.1
    EXPECT_DOUBLE_EQ(panel.y(1, 1), 0.3);   // 0.4 - 0.1
    EXPECT_DOUBLE_EQ(panel.y(2, 0), -0.2);  // 0.0 - 0.2
}

TEST(PanelCsv, ErrorsCarryLineNumbers) {
    const std::string bad_row = write_temp(
        "panel_badrow.csv",
        "Period,Mkt-RF,RF,P1\n"
        "202001,1.5,0.1,2.0\n"
        "202002,oops,0.1,1.1\n"
        "202003,0.2,0.2,0.0\n");
    try {
        ingest_panel_csv(bad_row);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    const std::string no_rf = write_temp(
        "panel_norf.csv", "Period,Mkt-RF,P1,P2\n202001,1.5,2.0,1.0\n");
    EXPECT_THROW(ingest_panel_csv(no_rf), DataError);
    const std::string no_factors = write_temp(
        "panel_nofac.csv", "Period,RF,P1,P2\n202001,0.1,2.0,1.0\n");
    EXPECT_THROW(ingest_panel_csv(no_factors), DataError);
    const std::string short_row = write_temp(
        "panel_short.csv",
        "Period,Mkt-RF,RF,P1\n202001,1.5,0.1,2.0\n202002,1.5,0.1\n");
    try {
        ingest_panel_csv(short_row);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
}

}  // namespace
