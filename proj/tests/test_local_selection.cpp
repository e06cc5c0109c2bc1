#include <gtest/gtest.h>

#include "lko/error.hpp"
#include "lko/experiment.hpp"
#include "lko/local_selection.hpp"
#include "lko/synthdata.hpp"

using namespace lko;

namespace {

struct Fixture {
    RunConfig config;
    SwitchDesign design;
    ExperimentData ex;
};

Fixture make(std::size_t n, std::uint64_t seed, std::size_t d = 20, std::size_t q_total = 10) {
    Fixture f;
    f.config.d = d;
    f.design = build_design(d, q_total, seed);
    f.ex = generate_experiment_dataset(f.config.chain(), f.design, n, seed + 1);
    return f;
}

// Rows whose genotype values are shifted far outside every oracle ball.
PairedDataset with_far_rows(const PairedDataset& data, std::size_t extra, double shift) {
    PairedDataset out = data;
    for (std::size_t i = 0; i < extra; ++i) {
        auto x = data.x.row(i % data.rows());
        auto xk = data.x_knock.row(i % data.rows());
        std::vector<double> a(x.begin(), x.end()), b(xk.begin(), xk.end());
        a[i % a.size()] += shift;
        b[i % b.size()] += shift;
        out.x.append_row(a);
        out.x_knock.append_row(b);
        out.y.push_back(static_cast<int>(i % 2));
    }
    return out;
}

} // namespace

TEST(LocalSelection, HugeRadiusEqualsGlobalFilter) {
    auto f = make(600, 3);
    RegionPlan plan;
    plan.points = {std::vector<double>(20, 1.0)};
    plan.radius = 1e9;
    auto local = run_local_selection(f.ex.data, plan, 0.2, 5);
    auto global = knockoff_filter(f.ex.data, plan.default_scores, 0.2, region_seed(5, plan.region(0)));
    ASSERT_EQ(local.size(), 1u);
    EXPECT_EQ(local[0].selected, global.selected);
    EXPECT_EQ(local[0].w, global.w);
    EXPECT_EQ(local[0].threshold, global.threshold);
    EXPECT_EQ(local[0].subsample_n, 600u);
}

TEST(LocalSelection, EmptyRegion) {
    auto f = make(200, 4);
    RegionPlan plan;
    plan.points = {std::vector<double>(20, 50.0)};
    plan.radius = 1.0;
    auto r = run_local_selection(f.ex.data, plan, 0.2);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_TRUE(r[0].selected.empty());
    EXPECT_EQ(r[0].threshold, no_threshold);
    EXPECT_EQ(r[0].subsample_n, 0u);
    EXPECT_TRUE(r[0].low_data);
}

TEST(LocalSelection, LowDataFlag) {
    auto f = make(40, 5);
    RegionPlan plan;
    plan.points = {std::vector<double>(20, 1.0)};
    plan.radius = 1.0;
    auto tiny = f.ex.data;
    tiny = PairedDataset(take_rows(tiny.x, std::vector<std::size_t>{0, 1, 2, 3, 4}),
                         take_rows(tiny.x_knock, std::vector<std::size_t>{0, 1, 2, 3, 4}),
                         take_rows(tiny.y, std::vector<std::size_t>{0, 1, 2, 3, 4}));
    auto r = run_local_selection(tiny, plan, 0.2);
    EXPECT_EQ(r[0].subsample_n, 5u);
    EXPECT_TRUE(r[0].low_data);
    auto full = run_local_selection(f.ex.data, plan, 0.2);
    EXPECT_FALSE(full[0].low_data);
}

TEST(LocalSelection, OutOfBallRowsChangeNothing) {
    auto f = make(800, 6);
    auto plan = oracle_plan(f.design, 4, 1.0, {});
    auto base = run_local_selection(f.ex.data, plan, 0.2, 9);
    auto grown = run_local_selection(with_far_rows(f.ex.data, 300, 10.0), plan, 0.2, 9);
    ASSERT_EQ(base.size(), grown.size());
    for (std::size_t l = 0; l < base.size(); ++l) EXPECT_EQ(base[l], grown[l]) << l;
}

TEST(LocalSelection, OrderInvarianceAndWorkers) {
    auto f = make(800, 7);
    auto plan = oracle_plan(f.design, 4, 1.0, {});
    auto base = run_local_selection(f.ex.data, plan, 0.2, 2, 1);
    auto parallel = run_local_selection(f.ex.data, plan, 0.2, 2, 3);
    EXPECT_EQ(base, parallel);

    RegionPlan reversed = plan;
    std::reverse(reversed.points.begin(), reversed.points.end());
    auto rev = run_local_selection(f.ex.data, reversed, 0.2, 2);
    for (std::size_t l = 0; l < 4; ++l) {
        EXPECT_EQ(rev[l].selected, base[3 - l].selected);
        EXPECT_EQ(rev[l].w, base[3 - l].w);
        EXPECT_EQ(rev[l].region_id, l);
    }
}

TEST(LocalSelection, PerRegionMethods) {
    auto f = make(500, 8);
    auto plan = oracle_plan(f.design, 2, 1.0, {});
    plan.method_per_region = {ScoreConfig{ScoreMethod::logistic, {}}, ScoreConfig{ScoreMethod::perm_drop, {}}};
    auto r = run_local_selection(f.ex.data, plan, 0.2, 1);
    ASSERT_EQ(r.size(), 2u);
    // accuracy drops are clamped at zero, so T and T~ are nonnegative and W
    // lies within [-1, 1]
    for (double w : r[1].w) EXPECT_LE(std::abs(w), 1.0);
}

TEST(LocalSelection, InvalidQIsConfigError) {
    auto f = make(100, 9);
    auto plan = oracle_plan(f.design, 1, 1.0, {});
    try {
        run_local_selection(f.ex.data, plan, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
    }
}

TEST(LocalSelection, DimensionMismatch) {
    auto f = make(100, 9);
    RegionPlan plan;
    plan.points = {std::vector<double>(19, 1.0)};
    try {
        run_local_selection(f.ex.data, plan, 0.2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::dimension);
    }
}

TEST(ValidatePlan, SpacingRules) {
    RegionPlan plan;
    plan.radius = 0.5;
    plan.points = {{0.0, 0.0}, {1.0, 0.0}};
    EXPECT_TRUE(validate_plan(plan).empty());
    plan.points = {{0.0, 0.0}, {0.5, 0.0}};
    EXPECT_EQ(validate_plan(plan).size(), 1u);
    plan.points = {{0.0, 0.0}};
    EXPECT_TRUE(validate_plan(plan).empty());
    plan.points = {{0.0, 0.0}, {0.0, 0.0}};
    EXPECT_FALSE(validate_plan(plan).empty());
}

TEST(ValidatePlan, HardErrors) {
    RegionPlan plan;
    plan.points = {{0.0}};
    plan.radius = 0.0;
    EXPECT_THROW(validate_plan(plan), Error);
    plan.radius = 1.0;
    plan.points.clear();
    EXPECT_THROW(validate_plan(plan), Error);
    plan.points = {{0.0}, {0.0, 1.0}};
    EXPECT_THROW(validate_plan(plan), Error);
    plan.points = {{0.0}, {5.0}};
    plan.method_per_region = {ScoreConfig{}};
    EXPECT_THROW(validate_plan(plan), Error);
}
