// Multiple-testing procedures: Cauchy combination (global and sequential),
// Bonferroni / Holm / Hochberg / Hommel, Gumbel threshold, Simes global test.
// Includes a brute-force closed-testing oracle and distributional checks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "scct/dist.hpp"
#include "scct/procedures.hpp"
#include "scct/rng.hpp"

namespace {

using namespace scct;

PValueSet pset(std::vector<double> p) { return make_pvalue_set(std::move(p)); }

// ---------- closed-testing oracles ----------

// Simes local test of the intersection hypothesis over index subset `members`
bool simes_local(const std::vector<double>& p, const std::vector<int>& members, double alpha) {
    std::vector<double> sub;
    for (int i : members) sub.push_back(p[i]);
    std::sort(sub.begin(), sub.end());
    const double m = static_cast<double>(sub.size());
    for (std::size_t k = 0; k < sub.size(); ++k)
        if (sub[k] <= (k + 1) * alpha / m) return true;
    return false;
}

bool bonf_local(const std::vector<double>& p, const std::vector<int>& members, double alpha) {
    double mn = 1.0;
    for (int i : members) mn = std::min(mn, p[i]);
    return mn <= alpha / static_cast<double>(members.size());
}

// closed testing: reject H_i iff every subset containing i has its local test
// rejected; returns the elementary rejection mask
template <typename Local>
std::vector<char> closure(const std::vector<double>& p, double alpha, Local local) {
    const int d = static_cast<int>(p.size());
    std::vector<char> rejected(d, 1);
    for (int mask = 1; mask < (1 << d); ++mask) {
        std::vector<int> members;
        for (int i = 0; i < d; ++i)
            if (mask & (1 << i)) members.push_back(i);
        if (!local(p, members, alpha))
            for (int i : members) rejected[i] = 0;
    }
    return rejected;
}

// ---------- Cauchy combination ----------

TEST(Gcc, TransformAndIdentity) {
    EXPECT_DOUBLE_EQ(cauchy_transform(0.5), 0.0);
    EXPECT_NEAR(cauchy_transform(0.25), 1.0, 1e-12);  // tan(pi/4)
    // d=1: the combined p-value is the p-value itself
    for (double p : {0.003, 0.2, 0.5, 0.77, 0.999}) {
        const auto pv = pset({p});
        EXPECT_NEAR(gcc_pvalue(gcc_statistic(pv, CauchyWeights::uniform(1))), p, 1e-9);
    }
}

TEST(Gcc, WeightedSumDefinition) {
    const std::vector<double> p{0.01, 0.2, 0.6, 0.93};
    const auto pv = pset(p);
    double expect = 0.0;
    for (double x : p) expect += cauchy_transform(x) / 4.0;
    EXPECT_NEAR(gcc_statistic(pv, CauchyWeights::uniform(4)), expect, 1e-12);
}

TEST(Gcc, ExactCauchyUnderIndependentUniforms) {
    // KS distance of the combined p-value to U(0,1), i.e. of the statistic to
    // standard Cauchy
    RngStream rng(31, 0);
    const int n = 20000, d = 5;
    std::vector<double> combined(n);
    for (int r = 0; r < n; ++r) {
        std::vector<double> p(d);
        for (auto& x : p) x = rng.uniform();
        combined[r] = gcc_pvalue(gcc_statistic(pset(p), CauchyWeights::uniform(d)));
    }
    std::sort(combined.begin(), combined.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        ks = std::max(ks, std::fabs(combined[i] - (i + 1.0) / n));
        ks = std::max(ks, std::fabs(combined[i] - static_cast<double>(i) / n));
    }
    EXPECT_LT(ks, 1.628 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

// ---------- SCC ----------

TEST(Scc, SuffixDefinitionAndGlobalAgreement) {
    const std::vector<double> p{0.004, 0.81, 0.03, 0.2, 0.55};
    const auto pv = pset(p);
    const auto w = CauchyWeights::uniform(5);
    const auto rep = scc_procedure(pv, w, 0.05);
    // adjusted value of the smallest p equals the global combination p-value
    const double global = gcc_pvalue(gcc_statistic(pv, w));
    EXPECT_NEAR(rep.adjusted_values[0], global, 1e-12);  // p=0.004 is rank 1
    // suffix values recomputed directly with fixed weights 1/d
    std::vector<double> sorted(p);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t rank = 0; rank < 5; ++rank) {
        double t = 0.0;
        for (std::size_t j = rank; j < 5; ++j) t += cauchy_transform(sorted[j]) / 5.0;
        const double suffix_p = gcc_pvalue(t);
        const std::size_t orig = pv.order[rank];
        EXPECT_NEAR(rep.adjusted_values[orig], suffix_p, 1e-12);
        EXPECT_EQ(static_cast<bool>(rep.rejected[orig]), suffix_p <= 0.05);
    }
}

TEST(Scc, MonotoneOnSmallPRegion) {
    // with every p-value in (0, 0.5] all Cauchy contributions are
    // non-negative, so shrinking one p-value can only help that hypothesis and
    // the global (rank-1) decision; other hypotheses may lose the shrunken
    // term from their suffix, so no claim is made about them
    RngStream rng(77, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t d = 3 + rng.uniform_index(6);
        std::vector<double> p(d);
        for (auto& x : p) x = 0.5 * rng.uniform();
        const auto before = scc_procedure(pset(p), CauchyWeights::uniform(d), 0.05);
        const std::size_t k = rng.uniform_index(d);
        std::vector<double> q(p);
        q[k] *= rng.uniform();  // strictly smaller, still in (0, 0.5]
        const auto after = scc_procedure(pset(q), CauchyWeights::uniform(d), 0.05);
        if (before.rejected[k]) EXPECT_TRUE(after.rejected[k]);
        EXPECT_LE(after.adjusted_values[k], before.adjusted_values[k] + 1e-15);
        if (before.global_rejected) EXPECT_TRUE(after.global_rejected);
    }
}

TEST(Scc, ExtremePValuesClampedNotNan) {
    const auto rep = scc_procedure(pset({0.0, 1.0, 0.5}), CauchyWeights::uniform(3), 0.05);
    for (double v : rep.adjusted_values) EXPECT_TRUE(std::isfinite(v));
}

// ---------- classical step procedures ----------

TEST(StepProcedures, HandFixtureAllFour) {
    const auto pv = pset({0.008, 0.012, 0.04, 0.041});
    EXPECT_EQ(bonferroni(pv, 0.05).rejection_count(), 2u);
    EXPECT_EQ(holm(pv, 0.05).rejection_count(), 2u);
    EXPECT_EQ(hochberg(pv, 0.05).rejection_count(), 4u);  // p_(4) <= alpha
    EXPECT_EQ(hommel(pv, 0.05).rejection_count(), 4u);
}

TEST(StepProcedures, HommelBeatsHochbergFixture) {
    // classic configuration where Hommel rejects and Hochberg does not
    const auto pv = pset({0.024, 0.030, 0.073});
    EXPECT_EQ(hochberg(pv, 0.05).rejection_count(), 0u);
    const auto hm = hommel(pv, 0.05);
    EXPECT_EQ(hm.rejection_count(), 1u);
    EXPECT_TRUE(hm.rejected[0]);
}

TEST(StepProcedures, ClosureOracleRandomized) {
    RngStream rng(101, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(6);  // d in [2, 7]
        std::vector<double> p(d);
        for (auto& x : p) {
            const int style = static_cast<int>(rng.uniform_index(3));
            x = style == 0 ? rng.uniform()
              : style == 1 ? 0.1 * rng.uniform()
                           : std::pow(rng.uniform(), 3);
        }
        const double alpha = 0.01 + 0.1 * rng.uniform();
        const auto hommel_rep = hommel(pset(p), alpha);
        const auto simes_cl = closure(p, alpha, simes_local);
        const auto holm_rep = holm(pset(p), alpha);
        const auto bonf_cl = closure(p, alpha, bonf_local);
        for (std::size_t i = 0; i < d; ++i) {
            ASSERT_EQ(static_cast<bool>(hommel_rep.rejected[i]),
                      static_cast<bool>(simes_cl[i]))
                << "Hommel vs Simes closure, trial " << trial << " index " << i;
            ASSERT_EQ(static_cast<bool>(holm_rep.rejected[i]),
                      static_cast<bool>(bonf_cl[i]))
                << "Holm vs Bonferroni closure, trial " << trial << " index " << i;
        }
    }
}

TEST(StepProcedures, NestingProperties) {
    RngStream rng(55, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(10);
        std::vector<double> p(d);
        for (auto& x : p) x = std::pow(rng.uniform(), 2);
        const auto pv = pset(p);
        const auto b = bonferroni(pv, 0.05);
        const auto ho = holm(pv, 0.05);
        const auto hb = hochberg(pv, 0.05);
        const auto hm = hommel(pv, 0.05);
        for (std::size_t i = 0; i < d; ++i) {
            if (b.rejected[i]) EXPECT_TRUE(ho.rejected[i]);
            if (ho.rejected[i]) EXPECT_TRUE(hm.rejected[i]);
            if (hb.rejected[i]) EXPECT_TRUE(hm.rejected[i]);
        }
    }
}

TEST(StepProcedures, PermutationEquivariance) {
    RngStream rng(66, 0);
    const std::vector<double> p{0.004, 0.81, 0.03, 0.2, 0.55, 0.011, 0.049};
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = p.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[perm[i]];
    const auto run = [&](auto proc) {
        const auto a = proc(pset(p), 0.05);
        const auto b = proc(pset(q), 0.05);
        for (std::size_t i = 0; i < p.size(); ++i)
            EXPECT_EQ(static_cast<bool>(b.rejected[i]),
                      static_cast<bool>(a.rejected[perm[i]]));
    };
    run([](const PValueSet& pv, double a) { return bonferroni(pv, a); });
    run([](const PValueSet& pv, double a) { return holm(pv, a); });
    run([](const PValueSet& pv, double a) { return hochberg(pv, a); });
    run([](const PValueSet& pv, double a) { return hommel(pv, a); });
    run([](const PValueSet& pv, double a) {
        return scc_procedure(pv, CauchyWeights::uniform(pv.size()), a);
    });
}

// ---------- Gumbel and Simes ----------

TEST(Gumbel, FrozenThresholds) {
    EXPECT_NEAR(gumbel_threshold(100, 0.05), 3.573345, 1e-5);
    EXPECT_NEAR(gumbel_threshold(341, 0.05), 3.859167, 1e-5);
    EXPECT_NEAR(gumbel_threshold(2500, 0.05), 4.301902, 1e-5);
    EXPECT_THROW(gumbel_threshold(1, 0.05), std::domain_error);
}

TEST(Gumbel, ProcedureRejectsBeyondThreshold) {
    const double thr = gumbel_threshold(100, 0.05);
    std::vector<double> stats(100, 0.0);
    stats[13] = thr + 0.01;
    stats[14] = -(thr + 0.5);
    stats[15] = thr - 0.01;
    const auto rep = gumbel_procedure(stats, 0.05);
    EXPECT_TRUE(rep.rejected[13]);
    EXPECT_TRUE(rep.rejected[14]);
    EXPECT_FALSE(rep.rejected[15]);
    EXPECT_EQ(rep.rejection_count(), 2u);
    EXPECT_TRUE(rep.global_rejected);
}

TEST(Simes, GlobalHandFixture) {
    // min_k p_(k) d / k = 0.024 at k=2
    EXPECT_TRUE(simes_global(pset({0.032 / 2, 0.04, 0.9}), 0.05));
    EXPECT_FALSE(simes_global(pset({0.04, 0.06, 0.9}), 0.05));
    EXPECT_TRUE(simes_global(pset({0.2, 0.3, 0.015}), 0.05));
}

TEST(Simes, DominatesHommelGlobalDecision) {
    // if the Hommel procedure rejects any hypothesis, the Simes global test
    // must reject too (elementary rejections come from closed testing with
    // Simes local tests, whose top-level test is the global Simes test); the
    // converse does not hold, e.g. {0.03, 0.032, 0.9}
    RngStream rng(202, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = 2 + rng.uniform_index(7);
        std::vector<double> p(d);
        for (auto& x : p) x = std::pow(rng.uniform(), 2);
        const auto pv = pset(p);
        if (hommel(pv, 0.05).rejection_count() > 0) EXPECT_TRUE(simes_global(pv, 0.05));
    }
    const auto pv = pset({0.03, 0.032, 0.9});
    EXPECT_TRUE(simes_global(pv, 0.05));
    EXPECT_EQ(hommel(pv, 0.05).rejection_count(), 0u);
}

TEST(PValues, ClampAndOrdering) {
    const auto pv = pset({0.5, -1.0, 2.0, 0.5, 0.1});
    EXPECT_DOUBLE_EQ(pv.raw[1], kPClampLo);
    EXPECT_DOUBLE_EQ(pv.raw[2], kPClampHi);
    // stable tie-break: equal values keep original relative order
    EXPECT_EQ(pv.order[0], 1u);
    EXPECT_EQ(pv.order[1], 4u);
    EXPECT_EQ(pv.order[2], 0u);
    EXPECT_EQ(pv.order[3], 3u);
    EXPECT_EQ(pv.order[4], 2u);
    EXPECT_THROW(make_pvalue_set({0.5, std::nan("")}), std::domain_error);
}

TEST(PValues, TwoSidedFromStats) {
    const DistributionKind n = DistributionKind::normal();
    const auto pv = two_sided_pvalues({0.0, 1.96, -1.96, 4.0}, n);
    EXPECT_NEAR(pv.raw[0], 1.0, 1e-12);
    EXPECT_NEAR(pv.raw[1], 0.05, 1e-3);
    EXPECT_NEAR(pv.raw[1], pv.raw[2], 1e-15);
    EXPECT_LT(pv.raw[3], 1e-3);
}

}  // namespace
