#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lko/core.hpp"

namespace lko {

/// Scores of the originals (t) and of their knockoffs (t_knock).
struct ImportancePair {
    std::vector<double> t;
    std::vector<double> t_knock;
    bool empty_data = false;

    std::size_t size() const noexcept { return t.size(); }
    /// W = T - T~.
    std::vector<double> differences() const;

    bool operator==(const ImportancePair&) const = default;
};

struct LogisticFitConfig {
    double l2_penalty = 1.0;
    double step_size = 0.1;
    std::size_t iterations = 500;

    void validate() const;
};

struct LogisticFit {
    std::vector<double> coef;
    double intercept = 0.0;

    /// Linear predictor for one row (same summation order as the fit).
    double linear_predictor(std::span<const double> row) const noexcept;
};

/// Full-batch gradient descent from zero on the L2-penalized mean logistic
/// loss, (1/n) sum log(1 + exp(-s_i eta_i)) + l2/(2n) |beta|^2, with a fixed
/// iteration count; the intercept is not penalized.
///
/// The linear predictor adds columns in pairs (j, j + m/2) before summing
/// over j, so for a [X | X~] design, exchanging paired columns yields
/// bit-for-bit exchanged coefficients.
LogisticFit fit_logistic(const FeatureMatrix& features, const Response& y, const LogisticFitConfig& config);

/// Column centering/scaling. With `paired`, columns j and j + m/2 share
/// statistics computed over their pooled values, so the transform commutes
/// with swapping original and knockoff columns. Zero-variance columns map to 0.
struct Standardizer {
    std::vector<double> center;
    std::vector<double> scale;  // 0 marks a constant column

    static Standardizer fit(const FeatureMatrix& m, bool paired);
    FeatureMatrix apply(const FeatureMatrix& m) const;
};

/// [X | X~] as one n x 2d matrix.
FeatureMatrix concat_columns(const FeatureMatrix& a, const FeatureMatrix& b);

enum class ScoreMethod { logistic, perm_drop };

ScoreMethod parse_score_method(std::string_view name);
std::string to_string(ScoreMethod m);

/// A trained model: predicted labels for a design matrix.
using Predictor = std::function<Response(const FeatureMatrix&)>;
/// Deterministic trainer: same (features, labels, seed) gives the same predictor.
using Trainer = std::function<Predictor(const FeatureMatrix&, const Response&, std::uint64_t)>;

/// Logistic engine as a classifier (label 1 iff eta >= 0). With `paired`, the
/// standardization pools columns j and j + m/2.
Trainer logistic_trainer(const LogisticFitConfig& config, bool paired);

/// T_j = |beta_j|, T~_j = |beta_{d+j}| from fit_logistic on the standardized
/// [X | X~]. Empty data gives zero vectors with the empty flag set.
ImportancePair logistic_scores(const PairedDataset& data, const LogisticFitConfig& config);

/// Accuracy drop when one column of [X | X~] is shuffled, clamped at 0.
/// Columns j and d + j are shuffled with the same permutation, drawn from the
/// stream (seed, j), which keeps the scores exactly swap-equivariant.
ImportancePair permutation_scores(const PairedDataset& data, const Trainer& trainer, std::uint64_t seed);

struct ScoreConfig {
    ScoreMethod method = ScoreMethod::logistic;
    LogisticFitConfig logistic;
};

/// Dispatches to logistic_scores or permutation_scores (logistic trainer).
ImportancePair paired_scores(const PairedDataset& data, const ScoreConfig& config, std::uint64_t seed);

/// Knockoff-free variant on X alone, used by the partition search.
std::vector<double> importance_scores_plain(const FeatureMatrix& x, const Response& y, const ScoreConfig& config,
                                            std::uint64_t seed);

/// Throws data error unless every label is 0 or 1.
void check_binary(const Response& y);

} // namespace lko
