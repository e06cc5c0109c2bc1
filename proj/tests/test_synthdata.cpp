#include <gtest/gtest.h>

#include <cmath>

#include "lko/error.hpp"
#include "lko/experiment.hpp"
#include "lko/synthdata.hpp"

using namespace lko;

namespace {

std::vector<double> point(std::size_t d, double fill = 1.0) { return std::vector<double>(d, fill); }

} // namespace

TEST(Design, DefaultSizes) {
    auto d = build_design(200, 18, 1);
    EXPECT_EQ(d.q_total(), 18u);
    IndexSet all{d.switch1, d.switch2};
    for (const auto& q : d.quarters) {
        EXPECT_EQ(q.size(), 4u);
        for (auto j : q) {
            EXPECT_LT(j, 200u);
            EXPECT_FALSE(all.contains(j));
            EXPECT_TRUE(d.signs[j] == 1 || d.signs[j] == -1);
            all = all.unite({j});
        }
    }
    EXPECT_EQ(all.size(), 18u);
    EXPECT_EQ(d.global_nonnulls(), all);
    EXPECT_DOUBLE_EQ(d.amplitude, 4.0);
}

TEST(Design, MinimalAndDeterministic) {
    auto d = build_design(10, 6, 5);
    for (const auto& q : d.quarters) EXPECT_EQ(q.size(), 1u);
    auto e = build_design(10, 6, 5);
    EXPECT_EQ(d.switch1, e.switch1);
    EXPECT_EQ(d.quarters, e.quarters);
    EXPECT_EQ(d.signs, e.signs);
}

TEST(Design, InvalidCountsAreConfigErrors) {
    for (auto [dim, q] : {std::pair<std::size_t, std::size_t>{50, 8}, {50, 4}, {5, 6}}) {
        try {
            build_design(dim, q, 1);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::config);
        }
    }
}

TEST(Response, BranchOfDoubleHighRow) {
    auto d = build_design(20, 10, 2);
    auto x = point(20);
    x[d.switch1] = 2;
    x[d.switch2] = 2;
    EXPECT_EQ(d.branch_of(x), 3u);
    x[d.switch2] = 1;
    EXPECT_EQ(d.branch_of(x), 2u);
}

TEST(Response, CenteredEffectsGiveHalf) {
    auto d = build_design(20, 10, 2);
    for (double s1 : {0.0, 2.0})
        for (double s2 : {1.0, 2.0}) {
            auto x = point(20);
            x[d.switch1] = s1;
            x[d.switch2] = s2;
            EXPECT_EQ(d.success_probability(x), 0.5);
        }
}

TEST(Response, InactiveFeaturesNeverMatter) {
    auto d = build_design(20, 10, 7);
    auto x = point(20);
    x[d.switch1] = 2;
    x[d.switch2] = 0;
    const auto& active = d.quarters[d.branch_of(x)];
    for (auto j : active) x[j] = 2;
    const double p = d.success_probability(x);
    EXPECT_NE(p, 0.5);
    for (std::size_t j = 0; j < 20; ++j) {
        if (j == d.switch1 || j == d.switch2 || std::find(active.begin(), active.end(), j) != active.end()) continue;
        for (double v : {0.0, 1.0, 2.0}) {
            auto y = x;
            y[j] = v;
            EXPECT_EQ(d.success_probability(y), p);
        }
    }
}

TEST(Response, SwitchIsLocallyNullWithinBranch) {
    // s2 = 0 and s2 = 1 both sit on the low side, so moving between them
    // keeps the same branch and the same probability.
    auto d = build_design(20, 10, 8);
    auto x = point(20);
    for (const auto& q : d.quarters)
        for (auto j : q) x[j] = 2;
    x[d.switch1] = 2;
    x[d.switch2] = 0;
    const double p = d.success_probability(x);
    x[d.switch2] = 1;
    EXPECT_EQ(d.success_probability(x), p);
}

TEST(Response, RequiresGenotypes) {
    auto d = build_design(6, 6, 1);
    FeatureMatrix x(2, 6, 0.5);
    try {
        generate_response(x, d, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::data);
    }
}

TEST(Oracle, SingleBranchBall) {
    auto d = build_design(20, 10, 3);
    auto z = point(20);
    z[d.switch1] = 2;
    z[d.switch2] = 2;
    auto o = oracle_local_nulls(d, Region(z, 0.4));
    EXPECT_EQ(o.nonnulls, IndexSet(d.quarters[3]));
    EXPECT_EQ(o.nulls, o.nonnulls.complement(20));
}

TEST(Oracle, HugeRadiusIsGlobal) {
    auto d = build_design(20, 10, 3);
    auto o = oracle_local_nulls(d, Region(point(20), 1e6));
    EXPECT_EQ(o.nonnulls, d.global_nonnulls());
}

TEST(Oracle, StraddlingSecondSwitchOnly) {
    auto d = build_design(20, 10, 4);
    auto z = point(20);
    z[d.switch1] = 2;
    z[d.switch2] = 1.5;
    auto o = oracle_local_nulls(d, Region(z, 0.4));
    auto expected = IndexSet{d.switch2}.unite(IndexSet(d.quarters[2])).unite(IndexSet(d.quarters[3]));
    EXPECT_EQ(o.nonnulls, expected);
}

TEST(Oracle, NestedInRadius) {
    auto d = build_design(30, 14, 5);
    auto z = point(30);
    z[d.switch1] = 0.3;
    z[d.switch2] = 2.2;
    IndexSet prev;
    for (double r : {0.1, 0.5, 0.8, 1.0, 1.3, 2.0, 5.0}) {
        auto o = oracle_local_nulls(d, Region(z, r));
        EXPECT_EQ(prev.intersect(o.nonnulls), prev) << r;
        EXPECT_EQ(o.nulls.unite(o.nonnulls), IndexSet::all(30));
        EXPECT_TRUE(o.nulls.intersect(o.nonnulls).empty());
        prev = o.nonnulls;
    }
    EXPECT_EQ(prev, d.global_nonnulls());
}

TEST(Oracle, MatchesBruteForceReachableBranches) {
    // Enumerate the genotype-free switch values within the ball on a fine
    // grid and collect the branches hit; compare with the analytic oracle.
    auto d = build_design(12, 6, 6);
    for (double a : {0.2, 1.0, 1.5, 1.9, 2.6})
        for (double b : {0.5, 1.3, 1.7, 3.0})
            for (double r : {0.1, 0.25, 0.6}) {
                auto z = point(12);
                z[d.switch1] = a;
                z[d.switch2] = b;
                IndexSet expect;
                bool seen[4] = {false, false, false, false};
                for (int i = 0; i <= 200; ++i)
                    for (int k = 0; k <= 200; ++k) {
                        auto y = z;
                        y[d.switch1] = a - r + 2 * r * i / 200.0;
                        y[d.switch2] = b - r + 2 * r * k / 200.0;
                        seen[d.branch_of(y)] = true;
                    }
                std::size_t hits = 0;
                for (std::size_t br = 0; br < 4; ++br)
                    if (seen[br]) {
                        ++hits;
                        expect = expect.unite(IndexSet(d.quarters[br]));
                    }
                const bool s1_varies = (seen[0] || seen[1]) && (seen[2] || seen[3]);
                const bool s2_varies = (seen[0] || seen[2]) && (seen[1] || seen[3]);
                if (s1_varies) expect = expect.unite({d.switch1});
                if (s2_varies) expect = expect.unite({d.switch2});
                EXPECT_EQ(oracle_local_nulls(d, Region(z, r)).nonnulls, expect) << a << " " << b << " " << r;
                EXPECT_GE(hits, 1u);
            }
}

TEST(ExperimentData, ZeroRowsRejected) {
    RunConfig c;
    c.d = 10;
    auto d = build_design(10, 6, 1);
    try {
        generate_experiment_dataset(c.chain(), d, 0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
    }
}

TEST(ExperimentData, BitIdenticalForSameSeed) {
    RunConfig c;
    c.d = 15;
    auto d = build_design(15, 6, 1);
    auto a = generate_experiment_dataset(c.chain(), d, 300, 9);
    auto b = generate_experiment_dataset(c.chain(), d, 300, 9);
    EXPECT_EQ(a.data, b.data);
    EXPECT_TRUE(a.data.x.is_genotype());
    EXPECT_TRUE(a.data.x_knock.is_genotype());
    EXPECT_EQ(a.truth.global_nonnulls, d.global_nonnulls());
}

TEST(ExperimentData, BranchFrequenciesMatchChain) {
    RunConfig c;
    auto d = build_design(50, 18, 11);
    auto ex = generate_experiment_dataset(c.chain(), d, 4000, 12);
    auto exact = branch_probabilities(c.chain(), d);
    double freq[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < 4000; ++i) freq[d.branch_of(ex.data.x.row(i))] += 1.0 / 4000;
    double total = 0;
    for (std::size_t b = 0; b < 4; ++b) {
        EXPECT_NEAR(freq[b], exact[b], 0.03);
        total += exact[b];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ExperimentData, ResponseFollowsSuccessProbability) {
    RunConfig c;
    c.d = 12;
    auto d = build_design(12, 6, 13);
    auto x = sample_markov(c.chain(), 20000, 1);
    auto y = generate_response(x, d, 2);
    double observed = 0, expected = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        observed += y[i];
        expected += d.success_probability(x.row(i));
    }
    EXPECT_NEAR(observed / 20000, expected / 20000, 0.01);
}
