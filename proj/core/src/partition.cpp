#include "lko/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lko/parallel.hpp"
#include "lko/rng.hpp"

namespace lko {

namespace {

struct Side {
    std::vector<std::size_t> low;
    std::vector<std::size_t> high;
};

Side split_rows(const FeatureMatrix& x, std::span<const std::size_t> rows, std::size_t c, double cutoff) {
    Side s;
    for (auto i : rows) (x(i, c) > cutoff ? s.high : s.low).push_back(i);
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    return r;
}

bool has_nonempty_split(const FeatureMatrix& x, std::span<const std::size_t> rows, const IndexSet& candidates,
                        std::span<const double> cutoffs) {
    for (auto c : candidates) {
        const auto lambdas = cutoffs.empty() ? midpoint_cutoffs(x, rows, c) : std::vector<double>(cutoffs.begin(), cutoffs.end());
        for (double l : lambdas) {
            const auto s = split_rows(x, rows, c, l);
            if (!s.low.empty() && !s.high.empty()) return true;
        }
    }
    return false;
}

void build(PartitionTree& tree, std::size_t node, const FeatureMatrix& x, const Response& y,
           const IndexSet& candidates, std::span<const double> cutoffs, std::size_t depth, const SplitOptions& options) {
    if (tree.nodes[node].depth >= depth) return;
    SplitCandidate best;
    try {
        SplitOptions child_opts = options;
        child_opts.seed = derive_seed(options.seed, {node});
        best = greedy_split(x, y, tree.nodes[node].rows, candidates, cutoffs, child_opts);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::partition || node == 0) throw;
        return;  // this node stays a leaf
    }
    auto sides = split_rows(x, tree.nodes[node].rows, best.feature, best.cutoff);
    const std::size_t child_depth = tree.nodes[node].depth + 1;
    const std::size_t low = tree.nodes.size();
    tree.nodes.push_back(PartitionNode{true, 0, 0.0, 0.0, 0, 0, child_depth, std::move(sides.low)});
    const std::size_t high = tree.nodes.size();
    tree.nodes.push_back(PartitionNode{true, 0, 0.0, 0.0, 0, 0, child_depth, std::move(sides.high)});
    auto& n = tree.nodes[node];
    n.leaf = false;
    n.feature = best.feature;
    n.cutoff = best.cutoff;
    n.gap = best.gap;
    n.low = low;
    n.high = high;
    build(tree, low, x, y, candidates, cutoffs, depth, options);
    build(tree, high, x, y, candidates, cutoffs, depth, options);
}

} // namespace

std::vector<double> midpoint_cutoffs(const FeatureMatrix& x, std::span<const std::size_t> rows, std::size_t c) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (auto i : rows) v.push_back(x(i, c));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> mids;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) mids.push_back(0.5 * (v[k] + v[k + 1]));
    return mids;
}

SplitCandidate greedy_split(const FeatureMatrix& x, const Response& y, std::span<const std::size_t> rows,
                            const IndexSet& candidates, std::span<const double> cutoffs, const SplitOptions& options) {
    require(y.size() == x.rows(), ErrorKind::dimension, "label count differs from sample count");
    require(candidates.max_plus_one() <= x.cols(), ErrorKind::dimension, "candidate feature out of range");

    struct Pair {
        std::size_t feature;
        double cutoff;
    };
    std::vector<Pair> pairs;
    for (auto c : candidates) {
        const auto lambdas = cutoffs.empty() ? midpoint_cutoffs(x, rows, c) : std::vector<double>(cutoffs.begin(), cutoffs.end());
        for (double l : lambdas) pairs.push_back({c, l});
    }
    // Feature-major, cutoff-ascending order is the tie-break order.
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return a.feature != b.feature ? a.feature < b.feature : a.cutoff < b.cutoff;
    });

    constexpr double infeasible = -1.0;
    std::vector<double> gaps(pairs.size(), infeasible);
    parallel_for(
        pairs.size(),
        [&](std::size_t k) {
            const auto [c, cutoff] = pairs[k];
            const auto sides = split_rows(x, rows, c, cutoff);
            if (sides.low.size() < options.min_side || sides.high.size() < options.min_side || sides.low.empty() ||
                sides.high.empty())
                return;
            const std::uint64_t key = derive_seed(options.seed, {c, std::bit_cast<std::uint64_t>(cutoff)});
            const auto t_high = importance_scores_plain(take_rows(x, sides.high), take_rows(y, sides.high),
                                                        options.scores, derive_seed(key, {1}));
            const auto t_low = importance_scores_plain(take_rows(x, sides.low), take_rows(y, sides.low),
                                                       options.scores, derive_seed(key, {0}));
            double gap = 0.0;
            for (std::size_t j = 0; j < t_high.size(); ++j) gap = std::max(gap, std::abs(t_high[j] - t_low[j]));
            gaps[k] = gap;
        },
        options.workers);

    std::size_t best = pairs.size();
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (gaps[k] != infeasible && (best == pairs.size() || gaps[k] > gaps[best])) best = k;
    require(best < pairs.size(), ErrorKind::partition, "no feasible (feature, cutoff) pair");
    return SplitCandidate{pairs[best].feature, pairs[best].cutoff, gaps[best]};
}

SplitCandidate greedy_split(const FeatureMatrix& x, const Response& y, const IndexSet& candidates,
                            std::span<const double> cutoffs, const SplitOptions& options) {
    const auto rows = all_rows(x.rows());
    return greedy_split(x, y, rows, candidates, cutoffs, options);
}

std::vector<std::size_t> PartitionTree::leaves() const {
    std::vector<std::size_t> out;
    if (nodes.empty()) return out;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto k = stack.back();
        stack.pop_back();
        if (nodes[k].leaf) {
            out.push_back(k);
        } else {
            stack.push_back(nodes[k].high);
            stack.push_back(nodes[k].low);
        }
    }
    return out;
}

std::vector<PartitionTree::PathStep> PartitionTree::path_to(std::size_t node) const {
    // Parent links are implicit; walk down from the root.
    std::vector<PathStep> path;
    std::size_t k = 0;
    while (k != node) {
        const auto& n = nodes[k];
        require(!n.leaf, ErrorKind::contract, "node not reachable from the root");
        const auto& target = nodes[node].rows;
        const auto& low_rows = nodes[n.low].rows;
        // Children partition their parent's rows, so any row of the target
        // identifies the branch; empty targets cannot occur (both sides feasible).
        const bool high = std::find(low_rows.begin(), low_rows.end(), target.front()) == low_rows.end();
        path.push_back({n.feature, n.cutoff, high});
        k = high ? n.high : n.low;
    }
    return path;
}

PartitionTree recursive_partition(const FeatureMatrix& x, const Response& y, const IndexSet& candidates,
                                  std::span<const double> cutoffs, std::size_t depth, std::size_t min_leaf,
                                  const SplitOptions& options) {
    require(depth >= 1, ErrorKind::config, "partition depth must be at least 1");
    require(min_leaf >= 1, ErrorKind::config, "min_leaf must be at least 1");
    require(x.rows() >= 1, ErrorKind::data, "partition needs at least one sample");
    PartitionTree tree;
    tree.nodes.push_back(PartitionNode{true, 0, 0.0, 0.0, 0, 0, 0, all_rows(x.rows())});
    SplitOptions opts = options;
    opts.min_side = std::max(options.min_side, min_leaf);
    try {
        build(tree, 0, x, y, candidates, cutoffs, depth, opts);
    } catch (const Error& e) {
        // A root whose only obstacle is min_leaf stays a single leaf; a root
        // with no nonempty split at all is an error.
        if (e.kind() != ErrorKind::partition || !has_nonempty_split(x, tree.nodes[0].rows, candidates, cutoffs)) throw;
    }
    return tree;
}

std::vector<std::vector<double>> representative_points(const PartitionTree& tree, const FeatureMatrix& x, double r) {
    require(r > 0.0, ErrorKind::config, "radius must be positive");
    const std::size_t d = x.cols();
    std::vector<std::vector<double>> centers;
    for (auto leaf : tree.leaves()) {
        const auto& rows = tree.nodes[leaf].rows;
        require(!rows.empty(), ErrorKind::partition, "empty leaf");
        std::vector<double> z(d);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> col;
            col.reserve(rows.size());
            for (auto i : rows) col.push_back(x(i, j));
            z[j] = median(std::move(col));
        }

        const auto path = tree.path_to(leaf);
        std::vector<std::size_t> split_features;
        for (const auto& s : path) split_features.push_back(s.feature);
        std::sort(split_features.begin(), split_features.end());
        split_features.erase(std::unique(split_features.begin(), split_features.end()), split_features.end());

        for (auto c : split_features) {
            double lo_min = -std::numeric_limits<double>::infinity();  // z_c >= lo_min
            double hi_max = std::numeric_limits<double>::infinity();   // z_c <= hi_max
            for (const auto& s : path) {
                if (s.feature != c) continue;
                if (s.high)
                    lo_min = std::max(lo_min, s.cutoff + r);
                else
                    hi_max = std::min(hi_max, s.cutoff - r);
            }
            require(lo_min <= hi_max, ErrorKind::partition,
                    "cutoffs on feature " + std::to_string(c) + " are closer than 2r along a path");
            double vmin = x(0, c), vmax = x(0, c);
            for (std::size_t i = 1; i < x.rows(); ++i) {
                vmin = std::min(vmin, x(i, c));
                vmax = std::max(vmax, x(i, c));
            }
            require(r <= vmax - vmin, ErrorKind::partition,
                    "radius exceeds the data range of split feature " + std::to_string(c));
            if (std::isinf(lo_min))
                z[c] = hi_max;
            else if (std::isinf(hi_max))
                z[c] = lo_min;
            else
                z[c] = 0.5 * (lo_min + hi_max);
        }
        for (const auto& s : path)
            require(std::abs(z[s.feature] - s.cutoff) >= r * (1.0 - 1e-12), ErrorKind::contract,
                    "representative ball crosses an ancestor cutoff");
        centers.push_back(std::move(z));
    }
    return centers;
}

} // namespace lko
