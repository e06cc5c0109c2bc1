#include "lko/local_selection.hpp"

#include <bit>
#include <sstream>

#include "lko/parallel.hpp"
#include "lko/rng.hpp"

namespace lko {

const ScoreConfig& RegionPlan::scores(std::size_t l) const {
    return method_per_region.empty() ? default_scores : method_per_region.at(l);
}

std::vector<std::string> validate_plan(const RegionPlan& plan) {
    require(plan.radius > 0.0, ErrorKind::config, "plan radius must be positive");
    require(!plan.points.empty(), ErrorKind::config, "plan needs at least one point");
    require(plan.method_per_region.empty() || plan.method_per_region.size() == plan.points.size(), ErrorKind::config,
            "method_per_region must be empty or list one method per point");
    const std::size_t d = plan.points.front().size();
    for (const auto& p : plan.points) require(p.size() == d, ErrorKind::dimension, "plan points differ in dimension");

    std::vector<std::string> warnings;
    for (std::size_t a = 0; a < plan.points.size(); ++a) {
        for (std::size_t b = a + 1; b < plan.points.size(); ++b) {
            const double dist = sup_distance(plan.points[a], plan.points[b]);
            std::ostringstream msg;
            if (dist == 0.0) {
                msg << "points " << a << " and " << b << " are duplicates";
                warnings.push_back(msg.str());
            } else if (dist < 2.0 * plan.radius) {
                msg << "points " << a << " and " << b << " are " << dist << " apart, closer than 2r = "
                    << 2.0 * plan.radius;
                warnings.push_back(msg.str());
            }
        }
    }
    return warnings;
}

std::uint64_t region_seed(std::uint64_t seed, const Region& region) {
    std::uint64_t h = derive_seed(seed, {std::bit_cast<std::uint64_t>(region.radius), region.dim()});
    for (double c : region.center) h = derive_seed(h, {std::bit_cast<std::uint64_t>(c)});
    return h;
}

SelectionResult knockoff_filter(const PairedDataset& data, const ScoreConfig& scores, double q, std::uint64_t seed) {
    require(q > 0.0 && q < 1.0, ErrorKind::config, "target FDR q must lie in (0, 1)");
    SelectionResult r;
    r.subsample_n = data.rows();
    r.low_data = data.rows() < low_data_rows;
    if (data.rows() == 0) {
        r.w.assign(data.cols(), 0.0);
        return r;
    }
    r.w = paired_scores(data, scores, seed).differences();
    auto sel = select_features(r.w, q);
    r.threshold = sel.threshold;
    r.selected = std::move(sel.selected);
    return r;
}

std::vector<SelectionResult> run_local_selection(const PairedDataset& data, const RegionPlan& plan, double q,
                                                 std::uint64_t seed, std::size_t workers) {
    require(q > 0.0 && q < 1.0, ErrorKind::config, "target FDR q must lie in (0, 1)");
    validate_plan(plan);
    require(plan.points.front().size() == data.cols(), ErrorKind::dimension,
            "plan dimension differs from feature count");

    std::vector<SelectionResult> results(plan.size());
    parallel_for(
        plan.size(),
        [&](std::size_t l) {
            const Region region = plan.region(l);
            const auto sub = subsample_region(data, region);
            auto r = knockoff_filter(sub, plan.scores(l), q, region_seed(seed, region));
            r.region_id = l;
            r.region = region;
            results[l] = std::move(r);
        },
        workers);
    return results;
}

} // namespace lko
