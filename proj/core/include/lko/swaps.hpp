#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lko/core.hpp"

namespace lko {

enum class Comparison { gt, le };

/// x[driver] > cutoff  or  x[driver] <= cutoff.
struct Condition {
    std::size_t driver = 0;
    double cutoff = 0.0;
    Comparison when = Comparison::gt;

    bool holds(std::span<const double> x) const noexcept {
        return when == Comparison::gt ? x[driver] > cutoff : x[driver] <= cutoff;
    }

    bool operator==(const Condition&) const = default;
};

/// Swaps `swapped` whenever every condition holds (no conditions: always).
struct SwapRule {
    std::vector<Condition> conditions;
    IndexSet swapped;

    bool fires(std::span<const double> x) const noexcept;

    bool operator==(const SwapRule&) const = default;
};

/// Feature-dependent swap index map sigma: R^d -> P([d]) built from threshold
/// rules; sigma(x) is the union of the swapped sets of all firing rules.
/// Any rule set is accepted. Whether the resulting map is a *local* swap is
/// a property to check (see is_involution_on_grid), not an assumption.
class SwapMap {
public:
    SwapMap() = default;
    SwapMap(std::size_t dim, std::vector<SwapRule> rules);

    static SwapMap constant(std::size_t dim, IndexSet swapped);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<SwapRule>& rules() const noexcept { return rules_; }

    IndexSet operator()(std::span<const double> x) const;

    /// Union of all driver coordinates.
    IndexSet drivers() const;

    bool operator==(const SwapMap&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<SwapRule> rules_;
};

using VectorPair = std::pair<std::vector<double>, std::vector<double>>;

/// Exchanges the coordinates sigma(x) between x and x_knock. The index set is
/// evaluated at the original x.
VectorPair apply_swap(std::span<const double> x, std::span<const double> x_knock, const SwapMap& sigma);

/// True iff swapping twice (re-evaluating sigma on the swapped x) restores
/// every grid pair.
bool is_involution_on_grid(const SwapMap& sigma, std::span<const VectorPair> grid);

/// Per-coordinate pieces sigma_i with sigma_i(x) = {i} if i in sigma(x) else {}.
std::vector<SwapMap> decompose_swap(const SwapMap& sigma);

/// sigma^r: agrees with sigma on A^r = {z : sigma constant on B(z, r)} and is
/// empty elsewhere. Membership in A^r is decided exactly by enumerating the
/// threshold cells each driver coordinate can reach inside the ball.
class RestrictedSwap {
public:
    RestrictedSwap(SwapMap base, double radius);

    const SwapMap& base() const noexcept { return base_; }
    double radius() const noexcept { return radius_; }

    bool in_stable_set(std::span<const double> z) const;
    IndexSet operator()(std::span<const double> z) const;

private:
    SwapMap base_;
    double radius_;
};

RestrictedSwap restrict_swap(const SwapMap& sigma, double radius);

struct SignBalance {
    std::size_t feature = 0;
    std::size_t positives = 0;
    std::size_t nonzero = 0;
    double fraction = 0.0;  // positives / nonzero
    double p_value = 1.0;   // exact two-sided binomial test against 1/2
    bool degenerate = false;  // every sample had W_j == 0
};

/// Sign balance of W_j over repeated samples for each j in `null_set`.
/// Requires at least 30 samples.
std::vector<SignBalance> flip_sign_check(std::span<const std::vector<double>> w_samples, const IndexSet& null_set);

} // namespace lko
