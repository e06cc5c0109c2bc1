#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "lko/core.hpp"
#include "lko/markov.hpp"

namespace lko {

/// Switch-feature response design over genotype features. Two switches pick
/// one of four equal-size quarters of the effect features; only the chosen
/// quarter drives the response of a sample.
///
/// Branch code b = 2 * [X_s1 > cutoff] + [X_s2 > cutoff]. The quarters are
/// consecutive chunks of the effect indices s_3..s_q, the first chunk going
/// to branch (1,1), then (1,0), (0,1), (0,0).
struct SwitchDesign {
    std::size_t dim = 0;
    std::size_t switch1 = 0;
    std::size_t switch2 = 0;
    std::array<std::vector<std::size_t>, 4> quarters;  // indexed by branch code
    std::vector<int> signs;                            // per feature, +1 / -1 (0 for non-effects)
    double amplitude = 0.0;
    double cutoff = 1.5;
    std::uint64_t seed = 0;

    std::size_t q_total() const noexcept { return 2 + 4 * quarters[0].size(); }
    std::size_t branch_of(std::span<const double> x) const noexcept;
    /// Global non-nulls {s_1, s_2} + all quarters.
    IndexSet global_nonnulls() const;
    /// Bernoulli success probability for one sample.
    double success_probability(std::span<const double> x) const;
};

/// Picks q_total distinct features uniformly at random; the first two are the
/// switches, the rest fill the quarters in sampled order. Signs are uniform
/// +/-1 and the amplitude is 8 / sqrt(quarter size).
SwitchDesign build_design(std::size_t dim, std::size_t q_total, std::uint64_t seed);

/// Y_i ~ Bernoulli(sigmoid(sum_{j in Q_b(i)} sign_j * a * (X_ij - 1))),
/// row i drawing from the stream (seed, i).
Response generate_response(const FeatureMatrix& x, const SwitchDesign& design, std::uint64_t seed);

struct LocalNulls {
    IndexSet nulls;
    IndexSet nonnulls;
};

/// r-local null/non-null sets at a region. A switch whose ball interval stays
/// on one side of the cutoff is locally null; a straddled switch is non-null.
/// Non-nulls also include the quarters of every branch the ball reaches.
LocalNulls oracle_local_nulls(const SwitchDesign& design, const Region& region);

struct GroundTruth {
    IndexSet global_nonnulls;
    std::array<IndexSet, 4> branch_active;
};

GroundTruth ground_truth(const SwitchDesign& design);

struct ExperimentData {
    PairedDataset data;
    GroundTruth truth;
};

/// Samples X from the chain, generates knockoffs once, then Y; each step
/// uses its own stream derived from `seed`.
ExperimentData generate_experiment_dataset(const MarkovChainModel& model, const SwitchDesign& design, std::size_t n,
                                           std::uint64_t seed);

/// Exact probability of each branch code under the chain.
std::array<double, 4> branch_probabilities(const MarkovChainModel& model, const SwitchDesign& design);

} // namespace lko
