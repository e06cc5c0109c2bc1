#include <gtest/gtest.h>

#include <cmath>

#include "lko/error.hpp"
#include "lko/markov.hpp"
#include "oracles.hpp"

using namespace lko;

namespace {

MarkovChainModel two_state_chain() {
    MarkovChainModel m;
    m.states = 2;
    m.length = 3;
    m.initial = {0.3, 0.7};
    m.transitions = {{0.9, 0.1, 0.2, 0.8}, {0.6, 0.4, 0.25, 0.75}};
    return m;
}

} // namespace

TEST(MarkovModel, ValidationCatchesBadRows) {
    auto m = two_state_chain();
    EXPECT_NO_THROW(m.validate());
    m.transitions[0][0] = 0.95;
    try {
        m.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::model);
    }
}

TEST(MarkovModel, MarginalsMatchEnumeration) {
    auto m = oracle::random_chain(3, 4, 5);
    std::vector<std::vector<double>> brute(4, std::vector<double>(3, 0.0));
    double total = 0.0;
    for (std::size_t code = 0; code < 81; ++code) {
        const auto path = decode_path(code, 3, 4);
        const double p = m.probability(path);
        total += p;
        for (std::size_t j = 0; j < 4; ++j) brute[j][path[j]] += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t j = 0; j < 4; ++j) {
        const auto mj = m.marginal(j);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(mj[k], brute[j][k], 1e-12);
    }
}

TEST(FitMarkov, SingleSampleWithoutSmoothing) {
    auto m = fit_markov(FeatureMatrix{{0, 1}}, 2, 0.0);
    EXPECT_EQ(m.initial, (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(m.transition(0, 0, 0), 0.0);
    EXPECT_EQ(m.transition(0, 0, 1), 1.0);
}

TEST(FitMarkov, SmoothingKeepsProbabilitiesInside) {
    FeatureMatrix x(20, 3, 1.0);
    auto m = fit_markov(x, 3);
    EXPECT_TRUE(m.strictly_positive());
    for (double p : m.initial) {
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, 1.0);
    }
}

TEST(FitMarkov, OutOfRangeStateIsDataError) {
    try {
        fit_markov(FeatureMatrix{{0, 3}}, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::data);
    }
}

TEST(FitMarkov, ConsistentOnSimulatedData) {
    auto truth = oracle::random_chain(3, 5, 21);
    auto m = fit_markov(sample_markov(truth, 1000, 4), 3);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(m.initial[k], truth.initial[k], 0.05);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t c = 0; c < 9; ++c) EXPECT_NEAR(m.transitions[t][c], truth.transitions[t][c], 0.1);
}

TEST(SampleMarkov, DeterministicModelRepeatsOnePath) {
    MarkovChainModel m;
    m.states = 3;
    m.length = 4;
    m.initial = {0, 0, 1};
    m.transitions.assign(3, {0, 1, 0, 0, 1, 0, 1, 0, 0});
    auto x = sample_markov(m, 50, 9);
    for (std::size_t i = 0; i < 50; ++i) {
        EXPECT_EQ(x(i, 0), 2.0);
        EXPECT_EQ(x(i, 1), 0.0);
        EXPECT_EQ(x(i, 2), 1.0);
        EXPECT_EQ(x(i, 3), 1.0);
    }
}

TEST(SampleMarkov, SameSeedSameOutput) {
    auto m = oracle::random_chain(3, 6, 1);
    EXPECT_EQ(sample_markov(m, 100, 77), sample_markov(m, 100, 77));
    EXPECT_NE(sample_markov(m, 100, 77), sample_markov(m, 100, 78));
}

TEST(SampleMarkov, EmpiricalTransitionsConverge) {
    MarkovChainModel m;
    m.states = 2;
    m.length = 2;
    m.initial = {0.4, 0.6};
    m.transitions = {{0.7, 0.3, 0.2, 0.8}};
    auto x = sample_markov(m, 10000, 3);
    double c[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < x.rows(); ++i) c[static_cast<int>(x(i, 0))][static_cast<int>(x(i, 1))] += 1;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            EXPECT_NEAR(c[a][b] / (c[a][0] + c[a][1]), m.transition(0, a, b), 0.03);
}

TEST(Knockoffs, SingleFeatureIsIndependentMarginalDraw) {
    MarkovChainModel m;
    m.states = 3;
    m.length = 1;
    m.initial = {0.2, 0.5, 0.3};
    auto cond = sequential_conditional(m);
    for (std::size_t k = 0; k < 3; ++k) {
        const std::vector<std::size_t> x{k};
        const auto law = cond(x, std::span<const std::size_t>{});
        for (std::size_t v = 0; v < 3; ++v) EXPECT_NEAR(law[v], m.initial[v], 1e-15);
    }
    FeatureMatrix x(20000, 1, 1.0);
    auto xk = knockoff_markov(m, x, 5);
    double freq[3] = {0, 0, 0};
    for (std::size_t i = 0; i < xk.rows(); ++i) freq[static_cast<int>(xk(i, 0))] += 1.0 / 20000;
    for (std::size_t v = 0; v < 3; ++v) EXPECT_NEAR(freq[v], m.initial[v], 0.015);
}

TEST(Knockoffs, IndependentModelUsesMarginals) {
    IndependentModel im{2, {{0.25, 0.75}, {0.5, 0.5}, {0.9, 0.1}}};
    auto cond = sequential_conditional(im.as_chain());
    const std::vector<std::size_t> x{1, 0, 1}, prefix{0, 1};
    for (std::size_t j = 0; j < 3; ++j) {
        const auto law = cond(x, std::span<const std::size_t>(prefix).first(std::min<std::size_t>(j, 2)));
        for (std::size_t v = 0; v < 2; ++v) EXPECT_NEAR(law[v], im.marginals[j][v], 1e-12);
    }
    FeatureMatrix xs(5000, 3, 0.0);
    auto xk = knockoff_independent(im, xs, 2);
    double ones[3] = {0, 0, 0};
    for (std::size_t i = 0; i < 5000; ++i)
        for (std::size_t j = 0; j < 3; ++j) ones[j] += xk(i, j) / 5000;
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(ones[j], im.marginals[j][1], 0.025);
}

TEST(Knockoffs, DynamicProgramMatchesBruteForceConditionals) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const std::size_t K = 2 + seed % 2, d = 2 + seed % 3;
        auto m = oracle::random_chain(K, d, seed);
        auto fast = sequential_conditional(m);
        auto slow = oracle::brute_force_conditional(m);
        std::size_t side = 1;
        for (std::size_t j = 0; j < d; ++j) side *= K;
        for (std::size_t cx = 0; cx < side; ++cx)
            for (std::size_t ck = 0; ck < side; ++ck) {
                const auto x = decode_path(cx, K, d);
                const auto xk = decode_path(ck, K, d);
                for (std::size_t j = 0; j < d; ++j) {
                    const std::span<const std::size_t> prefix(xk.data(), j);
                    const auto a = fast(x, prefix);
                    const auto b = slow(x, prefix);
                    for (std::size_t v = 0; v < K; ++v) ASSERT_NEAR(a[v], b[v], 1e-12);
                }
            }
    }
}

TEST(Knockoffs, DeterministicGivenSeed) {
    auto m = oracle::random_chain(3, 8, 2);
    auto x = sample_markov(m, 200, 1);
    EXPECT_EQ(knockoff_markov(m, x, 10), knockoff_markov(m, x, 10));
    EXPECT_NE(knockoff_markov(m, x, 10), knockoff_markov(m, x, 11));
}

TEST(Knockoffs, EmpiricalPairFrequenciesMatchExactPmf) {
    auto m = two_state_chain();
    auto pmf = exact_joint_pmf(m);
    const std::size_t n = 200000;
    auto x = sample_markov(m, n, 12);
    auto xk = knockoff_markov(m, x, 13);
    std::vector<double> freq(pmf.mass.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cx = 0, ck = 0, base = 1;
        for (std::size_t j = 0; j < 3; ++j) {
            cx += static_cast<std::size_t>(x(i, j)) * base;
            ck += static_cast<std::size_t>(xk(i, j)) * base;
            base *= 2;
        }
        freq[cx * 8 + ck] += 1.0 / n;
    }
    for (std::size_t c = 0; c < freq.size(); ++c) EXPECT_NEAR(freq[c], pmf.mass[c], 0.004) << c;
}

TEST(ExactPmf, SingleUniformFeature) {
    MarkovChainModel m;
    m.states = 2;
    m.length = 1;
    m.initial = {0.5, 0.5};
    auto pmf = exact_joint_pmf(m);
    ASSERT_EQ(pmf.mass.size(), 4u);
    for (double p : pmf.mass) EXPECT_NEAR(p, 0.25, 1e-15);
}

TEST(ExactPmf, NormalizedForRandomModels) {
    for (std::uint64_t s = 0; s < 5; ++s) EXPECT_NEAR(exact_joint_pmf(oracle::random_chain(3, 4, s)).total(), 1.0, 1e-10);
}

TEST(ExactPmf, SizeLimitEnforced) {
    auto m = oracle::random_chain(3, 8, 0);  // 3^16 > 1e7
    try {
        exact_joint_pmf(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::size);
    }
}

TEST(ExactPmf, AsymmetricTwoByTwoInvariantUnderEverySwap) {
    MarkovChainModel m;
    m.states = 2;
    m.length = 2;
    m.initial = {0.15, 0.85};
    m.transitions = {{0.9, 0.1, 0.35, 0.65}};
    auto pmf = exact_joint_pmf(m);
    for (const IndexSet& s : {IndexSet{0}, IndexSet{1}, IndexSet{0, 1}})
        EXPECT_LE(total_variation(pmf, swap_pmf(pmf, s)), 1e-10);
}

TEST(ExactPmf, KnockoffMarginalEqualsOriginalMarginal) {
    auto m = oracle::random_chain(3, 3, 8);
    auto pmf = exact_joint_pmf(m);
    std::vector<double> px(27, 0.0), pk(27, 0.0);
    for (std::size_t c = 0; c < pmf.mass.size(); ++c) {
        px[c / 27] += pmf.mass[c];
        pk[c % 27] += pmf.mass[c];
    }
    for (std::size_t c = 0; c < 27; ++c) EXPECT_NEAR(px[c], pk[c], 1e-12);
}

TEST(Exchangeability, IndependentUniformIsExact) {
    IndependentModel im{2, {{0.5, 0.5}, {0.5, 0.5}}};
    EXPECT_EQ(exchangeability_report(im.as_chain()).max_deviation, 0.0);
}

TEST(Exchangeability, ThreeByThreeChain) {
    auto m = oracle::random_chain(3, 3, 31);
    EXPECT_LE(exchangeability_report(m).max_deviation, 1e-10);
    EXPECT_LE(exchangeability_report(m, oracle::brute_force_conditional(m)).max_deviation, 1e-10);
}

TEST(Exchangeability, BrokenSamplerIsCaught) {
    // Strongly correlated chain: resampling from marginals destroys the
    // original/knockoff dependence pattern.
    MarkovChainModel m;
    m.states = 2;
    m.length = 3;
    m.initial = {0.5, 0.5};
    m.transitions.assign(2, {0.9, 0.1, 0.1, 0.9});
    auto report = exchangeability_report(m, oracle::marginal_resampling(m));
    EXPECT_GT(report.max_deviation, 0.01);
    EXPECT_FALSE(report.worst_swap.empty());
}
