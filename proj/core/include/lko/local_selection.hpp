#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lko/core.hpp"
#include "lko/filter.hpp"
#include "lko/importance.hpp"

namespace lko {

/// Points z_1..z_L sharing one radius, with an optional score engine per
/// region (empty: `default_scores` everywhere).
struct RegionPlan {
    std::vector<std::vector<double>> points;
    double radius = 1.0;
    std::vector<ScoreConfig> method_per_region;
    ScoreConfig default_scores;

    std::size_t size() const noexcept { return points.size(); }
    Region region(std::size_t l) const { return Region(points[l], radius); }
    const ScoreConfig& scores(std::size_t l) const;
};

/// Subsamples with fewer rows than this are processed but flagged low_data.
inline constexpr std::size_t low_data_rows = 10;

/// Hard errors: radius <= 0, no points, ragged points or a method list whose
/// length is neither 0 nor L. Warnings: centers closer than 2r (sup norm),
/// duplicate centers.
std::vector<std::string> validate_plan(const RegionPlan& plan);

/// Scoring seed for a region: a function of (seed, center, radius) only, so
/// results do not depend on the region's position in the plan.
std::uint64_t region_seed(std::uint64_t seed, const Region& region);

/// Knockoff filter on one dataset without subsampling.
SelectionResult knockoff_filter(const PairedDataset& data, const ScoreConfig& scores, double q, std::uint64_t seed);

/// For each plan point: keep rows whose original and knockoff both lie in the
/// ball, score that subsample only, threshold and select. Knockoffs must have
/// been generated once on the full data beforehand. Output follows plan order.
/// Regions are processed on up to `workers` threads (0: hardware concurrency)
/// with identical output for any worker count.
std::vector<SelectionResult> run_local_selection(const PairedDataset& data, const RegionPlan& plan, double q,
                                                 std::uint64_t seed = 0, std::size_t workers = 1);

} // namespace lko
