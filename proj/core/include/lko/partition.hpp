#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lko/core.hpp"
#include "lko/importance.hpp"

namespace lko {

struct SplitCandidate {
    std::size_t feature = 0;
    double cutoff = 0.0;
    double gap = 0.0;  // sup-norm distance between the two sides' score vectors

    bool operator==(const SplitCandidate&) const = default;
};

/// Midpoints between consecutive distinct values of column c over `rows`.
std::vector<double> midpoint_cutoffs(const FeatureMatrix& x, std::span<const std::size_t> rows, std::size_t c);

struct SplitOptions {
    ScoreConfig scores;
    std::uint64_t seed = 0;
    /// A (feature, cutoff) pair is feasible when both sides keep at least this many rows.
    std::size_t min_side = 1;
    /// Evaluate candidate pairs on this many threads (0: hardware concurrency).
    std::size_t workers = 1;
};

/// One greedy step over the rows `rows`: for each candidate feature c and
/// cutoff lambda, split into X_c > lambda and X_c <= lambda, score each side
/// with the knockoff-free engine and keep the pair with the largest sup-norm
/// score gap. Ties go to the smaller feature, then the smaller cutoff. An
/// empty `cutoffs` list means per-feature midpoints. Partition error when no
/// pair is feasible.
SplitCandidate greedy_split(const FeatureMatrix& x, const Response& y, std::span<const std::size_t> rows,
                            const IndexSet& candidates, std::span<const double> cutoffs, const SplitOptions& options);

/// Convenience overload over all rows.
SplitCandidate greedy_split(const FeatureMatrix& x, const Response& y, const IndexSet& candidates,
                            std::span<const double> cutoffs, const SplitOptions& options);

struct PartitionNode {
    bool leaf = true;
    std::size_t feature = 0;
    double cutoff = 0.0;
    double gap = 0.0;
    std::size_t low = 0;   // child with X_feature <= cutoff
    std::size_t high = 0;  // child with X_feature > cutoff
    std::size_t depth = 0;
    std::vector<std::size_t> rows;
};

/// Binary tree stored in a node array; node 0 is the root.
struct PartitionTree {
    std::vector<PartitionNode> nodes;

    /// Leaf node indices, low branch before high branch.
    std::vector<std::size_t> leaves() const;
    /// Splits along the path from the root to `node`: (feature, cutoff, went_high).
    struct PathStep {
        std::size_t feature;
        double cutoff;
        bool high;
    };
    std::vector<PathStep> path_to(std::size_t node) const;
};

/// Applies greedy_split recursively, stopping at `depth` levels of splits,
/// when no pair leaves both sides with at least `min_leaf` rows, or when no
/// pair is feasible. depth >= 1, min_leaf >= 1.
PartitionTree recursive_partition(const FeatureMatrix& x, const Response& y, const IndexSet& candidates,
                                  std::span<const double> cutoffs, std::size_t depth, std::size_t min_leaf,
                                  const SplitOptions& options);

/// One center per leaf (leaves() order). Split coordinates sit r inside every
/// ancestor cutoff (cutoff - r on the low side, cutoff + r on the high side;
/// midway when a coordinate is bounded on both sides); all other coordinates
/// are the leaf's coordinate-wise medians. Partition error when constraints
/// along a path are closer than 2r, or when r exceeds the data range of a
/// split feature.
std::vector<std::vector<double>> representative_points(const PartitionTree& tree, const FeatureMatrix& x, double r);

} // namespace lko
