#include "lko/filter.hpp"

#include <algorithm>
#include <cmath>

namespace lko {

double knockoff_threshold(std::span<const double> w, double q) {
    require(q > 0.0 && q < 1.0, ErrorKind::config, "target FDR q must lie in (0, 1)");
    std::vector<double> candidates;
    for (double v : w) {
        require(std::isfinite(v), ErrorKind::data, "W statistic is not finite");
        if (v != 0.0) candidates.push_back(std::abs(v));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Sort once and count with binary searches: #{W >= t} and #{W <= -t}.
    std::vector<double> sorted(w.begin(), w.end());
    std::sort(sorted.begin(), sorted.end());
    for (double t : candidates) {
        const auto above = static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t));
        const auto below = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), -t) - sorted.begin());
        if (above > 0.0 && (1.0 + below) / above <= q) return t;
    }
    return no_threshold;
}

IndexSet select_above(std::span<const double> w, double tau) {
    std::vector<std::size_t> out;
    if (std::isfinite(tau))
        for (std::size_t j = 0; j < w.size(); ++j)
            if (w[j] >= tau) out.push_back(j);
    return IndexSet(std::move(out));
}

Selection select_features(std::span<const double> w, double q) {
    Selection s;
    s.threshold = knockoff_threshold(w, q);
    s.selected = select_above(w, s.threshold);
    return s;
}

bool SelectionResult::operator==(const SelectionResult& o) const {
    const bool same_region = region.has_value() == o.region.has_value() &&
                             (!region || (region->center == o.region->center && region->radius == o.region->radius));
    return region_id == o.region_id && same_region && threshold == o.threshold && selected == o.selected &&
           w == o.w && subsample_n == o.subsample_n && low_data == o.low_data;
}

double fdp(const IndexSet& selected, const IndexSet& nulls) {
    const auto false_hits = selected.intersect(nulls).size();
    return static_cast<double>(false_hits) / static_cast<double>(std::max<std::size_t>(1, selected.size()));
}

EvalMetrics local_eval(const SelectionResult& result, const IndexSet& oracle_nulls, const IndexSet& oracle_nonnulls) {
    const std::size_t d = result.w.size();
    require(oracle_nulls.intersect(oracle_nonnulls).empty() && oracle_nulls.size() + oracle_nonnulls.size() == d &&
                oracle_nulls.max_plus_one() <= d && oracle_nonnulls.max_plus_one() <= d,
            ErrorKind::oracle, "oracle null/non-null sets do not partition the features");
    EvalMetrics m;
    m.false_discoveries = result.selected.intersect(oracle_nulls).size();
    m.true_discoveries = result.selected.intersect(oracle_nonnulls).size();
    m.fdp = fdp(result.selected, oracle_nulls);
    m.power = static_cast<double>(m.true_discoveries) /
              static_cast<double>(std::max<std::size_t>(1, oracle_nonnulls.size()));
    return m;
}

} // namespace lko
