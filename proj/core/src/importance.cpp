#include "lko/importance.hpp"

#include <algorithm>
#include <cmath>

#include "lko/rng.hpp"

namespace lko {

namespace {

double sigmoid(double eta) noexcept {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double paired_dot(std::span<const double> beta, std::span<const double> row) noexcept {
    const std::size_t m = row.size();
    const std::size_t h = m / 2;
    double s = 0.0;
    for (std::size_t j = 0; j < h; ++j) s += beta[j] * row[j] + beta[j + h] * row[j + h];
    if (m % 2 == 1) s += beta[m - 1] * row[m - 1];
    return s;
}

double accuracy(const Response& predicted, const Response& y) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hit += predicted[i] == y[i] ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(y.size());
}

FeatureMatrix with_column_permuted(const FeatureMatrix& m, std::size_t col, const std::vector<std::size_t>& perm) {
    FeatureMatrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, col) = m(perm[i], col);
    return out;
}

// Accuracy drop per column; column c uses the permutation keyed by key_of(c).
template <typename KeyOf>
std::vector<double> accuracy_drops(const FeatureMatrix& features, const Response& y, const Trainer& trainer,
                                   std::uint64_t seed, KeyOf key_of) {
    const auto predict = trainer(features, y, seed);
    const double base = accuracy(predict(features), y);
    std::vector<double> drops(features.cols(), 0.0);
    for (std::size_t c = 0; c < features.cols(); ++c) {
        Stream rng(seed, {key_of(c)});
        const auto perm = rng.permutation(features.rows());
        const double shuffled = accuracy(predict(with_column_permuted(features, c, perm)), y);
        drops[c] = std::max(0.0, base - shuffled);
    }
    return drops;
}

} // namespace

std::vector<double> ImportancePair::differences() const {
    std::vector<double> w(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) w[j] = t[j] - t_knock[j];
    return w;
}

void LogisticFitConfig::validate() const {
    require(l2_penalty >= 0.0, ErrorKind::config, "l2_penalty must be nonnegative");
    require(step_size > 0.0, ErrorKind::config, "step_size must be positive");
    require(iterations >= 1, ErrorKind::config, "iterations must be at least 1");
}

double LogisticFit::linear_predictor(std::span<const double> row) const noexcept {
    return intercept + paired_dot(coef, row);
}

void check_binary(const Response& y) {
    for (int v : y) require(v == 0 || v == 1, ErrorKind::data, "labels must be 0 or 1");
}

LogisticFit fit_logistic(const FeatureMatrix& features, const Response& y, const LogisticFitConfig& config) {
    config.validate();
    require(features.rows() >= 1, ErrorKind::data, "fit_logistic needs at least one sample");
    require(y.size() == features.rows(), ErrorKind::dimension, "label count differs from sample count");
    check_binary(y);

    const std::size_t n = features.rows();
    const std::size_t m = features.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    LogisticFit fit;
    fit.coef.assign(m, 0.0);
    std::vector<double> grad(m);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = features.row(i);
            const double resid = sigmoid(fit.linear_predictor(row)) - static_cast<double>(y[i]);
            grad_b += resid;
            for (std::size_t k = 0; k < m; ++k) grad[k] += resid * row[k];
        }
        for (std::size_t k = 0; k < m; ++k)
            fit.coef[k] -= config.step_size * (grad[k] * inv_n + config.l2_penalty * inv_n * fit.coef[k]);
        fit.intercept -= config.step_size * grad_b * inv_n;
    }
    return fit;
}

Standardizer Standardizer::fit(const FeatureMatrix& m, bool paired) {
    const std::size_t cols = m.cols();
    const std::size_t n = m.rows();
    require(!paired || cols % 2 == 0, ErrorKind::dimension, "paired standardization needs an even column count");
    Standardizer s;
    s.center.assign(cols, 0.0);
    s.scale.assign(cols, 0.0);
    if (n == 0) return s;
    const std::size_t groups = paired ? cols / 2 : cols;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t a = g;
        const std::size_t b = paired ? g + groups : g;
        const double count = static_cast<double>(paired ? 2 * n : n);
        // Pooled sums visit the pair in a fixed symmetric way: a + b == b + a.
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += paired ? m(i, a) + m(i, b) : m(i, a);
        const double mu = sum / count;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double da = m(i, a) - mu;
            if (paired) {
                const double db = m(i, b) - mu;
                ss += da * da + db * db;
            } else {
                ss += da * da;
            }
        }
        const double sd = std::sqrt(ss / count);
        s.center[a] = s.center[b] = mu;
        s.scale[a] = s.scale[b] = sd > 1e-12 ? sd : 0.0;
    }
    return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& m) const {
    require(m.cols() == center.size(), ErrorKind::dimension, "standardizer width differs from matrix");
    FeatureMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) = scale[j] > 0.0 ? (m(i, j) - center[j]) / scale[j] : 0.0;
    return out;
}

FeatureMatrix concat_columns(const FeatureMatrix& a, const FeatureMatrix& b) {
    require(a.rows() == b.rows(), ErrorKind::dimension, "concat_columns: row counts differ");
    FeatureMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = out.row(i);
        std::copy(a.row(i).begin(), a.row(i).end(), r.begin());
        std::copy(b.row(i).begin(), b.row(i).end(), r.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

ScoreMethod parse_score_method(std::string_view name) {
    if (name == "logistic") return ScoreMethod::logistic;
    if (name == "perm_drop") return ScoreMethod::perm_drop;
    fail(ErrorKind::config, "unknown score method '" + std::string(name) + "' (expected logistic or perm_drop)");
}

std::string to_string(ScoreMethod m) { return m == ScoreMethod::logistic ? "logistic" : "perm_drop"; }

Trainer logistic_trainer(const LogisticFitConfig& config, bool paired) {
    return [config, paired](const FeatureMatrix& features, const Response& y, std::uint64_t) -> Predictor {
        auto standardizer = Standardizer::fit(features, paired);
        auto fit = fit_logistic(standardizer.apply(features), y, config);
        return [standardizer = std::move(standardizer), fit = std::move(fit)](const FeatureMatrix& m) {
            const auto z = standardizer.apply(m);
            Response out(z.rows());
            for (std::size_t i = 0; i < z.rows(); ++i) out[i] = fit.linear_predictor(z.row(i)) >= 0.0 ? 1 : 0;
            return out;
        };
    };
}

ImportancePair logistic_scores(const PairedDataset& data, const LogisticFitConfig& config) {
    const std::size_t d = data.cols();
    ImportancePair out{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), false};
    if (data.rows() == 0) {
        out.empty_data = true;
        return out;
    }
    const auto design = concat_columns(data.x, data.x_knock);
    const auto fit = fit_logistic(Standardizer::fit(design, true).apply(design), data.y, config);
    for (std::size_t j = 0; j < d; ++j) {
        out.t[j] = std::abs(fit.coef[j]);
        out.t_knock[j] = std::abs(fit.coef[d + j]);
    }
    return out;
}

ImportancePair permutation_scores(const PairedDataset& data, const Trainer& trainer, std::uint64_t seed) {
    const std::size_t d = data.cols();
    ImportancePair out{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), false};
    if (data.rows() == 0) {
        out.empty_data = true;
        return out;
    }
    const auto design = concat_columns(data.x, data.x_knock);
    const auto drops = accuracy_drops(design, data.y, trainer, seed, [d](std::size_t c) { return c % d; });
    for (std::size_t j = 0; j < d; ++j) {
        out.t[j] = drops[j];
        out.t_knock[j] = drops[d + j];
    }
    return out;
}

ImportancePair paired_scores(const PairedDataset& data, const ScoreConfig& config, std::uint64_t seed) {
    if (config.method == ScoreMethod::logistic) return logistic_scores(data, config.logistic);
    return permutation_scores(data, logistic_trainer(config.logistic, true), seed);
}

std::vector<double> importance_scores_plain(const FeatureMatrix& x, const Response& y, const ScoreConfig& config,
                                            std::uint64_t seed) {
    require(x.rows() >= 1, ErrorKind::data, "importance scores need at least one sample");
    if (config.method == ScoreMethod::logistic) {
        const auto fit = fit_logistic(Standardizer::fit(x, false).apply(x), y, config.logistic);
        std::vector<double> t(x.cols());
        for (std::size_t j = 0; j < x.cols(); ++j) t[j] = std::abs(fit.coef[j]);
        return t;
    }
    return accuracy_drops(x, y, logistic_trainer(config.logistic, false), seed, [](std::size_t c) { return c; });
}

} // namespace lko
