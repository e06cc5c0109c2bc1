#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lko/core.hpp"

namespace lko {

inline constexpr double no_threshold = std::numeric_limits<double>::infinity();

/// Knockoff+ threshold:
///   tau = min{ t in {|W_j| : W_j != 0} : (1 + #{W_j <= -t}) / #{W_j >= t} <= q },
/// with the ratio taken as +inf when no W_j >= t. Returns +inf when no
/// candidate qualifies. q must lie in (0, 1).
double knockoff_threshold(std::span<const double> w, double q);

/// {j : W_j >= tau}; empty when tau is +inf.
IndexSet select_above(std::span<const double> w, double tau);

struct Selection {
    double threshold = no_threshold;
    IndexSet selected;
};

Selection select_features(std::span<const double> w, double q);

/// Outcome of the selection rule in one region (or globally).
struct SelectionResult {
    std::size_t region_id = 0;
    std::optional<Region> region;  // empty for a global run
    double threshold = no_threshold;
    IndexSet selected;
    std::vector<double> w;
    std::size_t subsample_n = 0;
    bool low_data = false;

    bool operator==(const SelectionResult& o) const;
};

struct EvalMetrics {
    double fdp = 0.0;
    double power = 0.0;
    std::size_t true_discoveries = 0;
    std::size_t false_discoveries = 0;
};

/// |selected & nulls| / max(1, |selected|).
double fdp(const IndexSet& selected, const IndexSet& nulls);

/// FDP against the local nulls and power |S & H1| / max(1, |H1|). The two
/// oracle sets must partition [0, d) with d = result.w.size().
EvalMetrics local_eval(const SelectionResult& result, const IndexSet& oracle_nulls, const IndexSet& oracle_nonnulls);

} // namespace lko
