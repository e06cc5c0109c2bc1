#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lko/core.hpp"

namespace lko {

/// K x K row-stochastic matrix, row-major.
using Transition = std::vector<double>;

/// Observed Markov chain over states {0, ..., K-1} of length d.
/// transitions[t] maps position t to position t + 1.
struct MarkovChainModel {
    std::size_t states = 3;
    std::size_t length = 1;
    std::vector<double> initial;
    std::vector<Transition> transitions;

    double transition(std::size_t t, std::size_t from, std::size_t to) const noexcept {
        return transitions[t][from * states + to];
    }

    /// Throws model error unless probabilities are normalized (1e-12).
    void validate() const;
    /// True when every probability is strictly positive.
    bool strictly_positive() const noexcept;

    /// Exact marginal law of X_j.
    std::vector<double> marginal(std::size_t j) const;
    /// Exact joint law of (X_a, X_b), a < b, as a K x K row-major table.
    std::vector<double> pair_marginal(std::size_t a, std::size_t b) const;
    /// Exact probability of one state sequence.
    double probability(std::span<const std::size_t> path) const;

    bool operator==(const MarkovChainModel&) const = default;
};

/// Independent features with per-coordinate marginals.
struct IndependentModel {
    std::size_t states = 3;
    std::vector<std::vector<double>> marginals;

    void validate() const;
    /// Equivalent chain whose transition rows all equal the next marginal.
    MarkovChainModel as_chain() const;
};

/// Homogeneous chain with transition rows stay * e_a + (1 - stay) * stationary;
/// `stationary` is then the marginal at every position.
MarkovChainModel sticky_chain(std::size_t length, std::span<const double> stationary, double stay);

/// Maximum-likelihood fit with add-`smoothing` pseudo-counts. A transition row
/// with no observations and no smoothing falls back to uniform.
MarkovChainModel fit_markov(const FeatureMatrix& x, std::size_t states, double smoothing = 0.5);

/// n independent chains; row i draws from the stream keyed by (seed, i).
FeatureMatrix sample_markov(const MarkovChainModel& model, std::size_t n, std::uint64_t seed);

/// Knockoff copies by sequential conditional sampling: for j = 1..d draw
/// X~_j from L(X_j | X_-j, X~_1:j-1). Computed exactly by a forward recursion
/// over normalizing messages, O(d K^2) per row. Row i uses the stream (seed, i).
FeatureMatrix knockoff_markov(const MarkovChainModel& model, const FeatureMatrix& x, std::uint64_t seed);

/// Independent features: conditionals reduce to marginals.
FeatureMatrix knockoff_independent(const IndependentModel& model, const FeatureMatrix& x, std::uint64_t seed);

/// Law of the j-th knockoff coordinate given the full original path and the
/// knockoff prefix x_knock[0..j). Used to enumerate the exact joint pmf.
using KnockoffConditional =
    std::function<std::vector<double>(std::span<const std::size_t> x, std::span<const std::size_t> x_knock_prefix)>;

/// The conditionals knockoff_markov samples from.
KnockoffConditional sequential_conditional(const MarkovChainModel& model);

/// Exact pmf of the pair (X, X~) over K^d x K^d outcomes.
/// Cell index: code(x) * K^d + code(x~), code little-endian in position.
struct JointPmf {
    std::size_t states = 0;
    std::size_t length = 0;
    std::vector<double> mass;

    std::size_t outcomes_per_side() const noexcept;
    double total() const noexcept;
};

inline constexpr std::size_t max_pmf_cells = 10'000'000;

/// Enumerates x under the chain and x~ under `conditional` (defaults to the
/// sampler's own conditionals). Size error when K^(2d) > 10^7.
JointPmf exact_joint_pmf(const MarkovChainModel& model, KnockoffConditional conditional = {});

/// Pmf of [X, X~]_swap(S) given the pmf of [X, X~].
JointPmf swap_pmf(const JointPmf& pmf, const IndexSet& swapped);

double total_variation(const JointPmf& a, const JointPmf& b);

struct ExchangeabilityReport {
    double max_deviation = 0.0;
    IndexSet worst_swap;
};

/// Max over all S subset of [d] of TV(pmf, pmf_swap(S)).
ExchangeabilityReport exchangeability_report(const MarkovChainModel& model, KnockoffConditional conditional = {});

/// Decodes a cell code into a state path of the given length.
std::vector<std::size_t> decode_path(std::size_t code, std::size_t states, std::size_t length);

} // namespace lko
