#include "lko/markov.hpp"

#include <cmath>
#include <string>

#include "lko/rng.hpp"

namespace lko {

namespace {

constexpr double norm_tol = 1e-12;

void check_distribution(std::span<const double> p, const std::string& what) {
    double s = 0.0;
    for (double v : p) {
        require(std::isfinite(v) && v >= 0.0, ErrorKind::model, what + " has a negative or non-finite entry");
        s += v;
    }
    require(std::abs(s - 1.0) <= norm_tol, ErrorKind::model, what + " does not sum to 1");
}

std::size_t state_of(double v, std::size_t states) {
    const double r = std::round(v);
    require(r == v && v >= 0.0 && r < static_cast<double>(states), ErrorKind::data,
            "value " + std::to_string(v) + " is not a state in [0, " + std::to_string(states) + ")");
    return static_cast<std::size_t>(r);
}

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t limit) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (out > limit / base) return limit + 1;
        out *= base;
    }
    return out;
}

// Forward recursion of the sequential conditional sampler. After `advance`
// has consumed positions 0..j-1, `next()` is the law of X~_j.
//   g_j(k) = pi(k)                                          j = 0
//   g_j(k) = Q_j(x_{j-1}, k) Q_j(x~_{j-1}, k) / N_{j-1}(k)   j > 0
//   law(k) ~ g_j(k) Q_{j+1}(k, x_{j+1})   (last position: ~ g_j(k))
//   N_j(m) = sum_k g_j(k) Q_{j+1}(k, m)
// N is renormalized at every step; constant factors cancel in every law.
class SequentialSampler {
public:
    SequentialSampler(const MarkovChainModel& model, std::span<const std::size_t> x)
        : model_(model), x_(x), g_(model.states), norm_(model.states, 1.0), law_(model.states) {}

    std::span<const double> next() {
        const std::size_t K = model_.states;
        const std::size_t j = pos_;
        if (j == 0) {
            for (std::size_t k = 0; k < K; ++k) g_[k] = model_.initial[k];
        } else {
            for (std::size_t k = 0; k < K; ++k)
                g_[k] = model_.transition(j - 1, x_[j - 1], k) * model_.transition(j - 1, prev_knock_, k) / norm_[k];
        }
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            law_[k] = j + 1 < model_.length ? g_[k] * model_.transition(j, k, x_[j + 1]) : g_[k];
            total += law_[k];
        }
        require(total > 0.0, ErrorKind::model, "zero-probability knockoff conditional");
        for (auto& v : law_) v /= total;
        return law_;
    }

    void advance(std::size_t knock_state) {
        const std::size_t K = model_.states;
        const std::size_t j = pos_;
        if (j + 1 < model_.length) {
            double total = 0.0;
            for (std::size_t m = 0; m < K; ++m) {
                double s = 0.0;
                for (std::size_t k = 0; k < K; ++k) s += g_[k] * model_.transition(j, k, m);
                norm_[m] = s;
                total += s;
            }
            for (auto& v : norm_) v /= total;
        }
        prev_knock_ = knock_state;
        ++pos_;
    }

private:
    const MarkovChainModel& model_;
    std::span<const std::size_t> x_;
    std::vector<double> g_;
    std::vector<double> norm_;
    std::vector<double> law_;
    std::size_t prev_knock_ = 0;
    std::size_t pos_ = 0;
};

std::vector<std::size_t> row_states(const FeatureMatrix& x, std::size_t i, std::size_t states) {
    std::vector<std::size_t> s(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) s[j] = state_of(x(i, j), states);
    return s;
}

} // namespace

void MarkovChainModel::validate() const {
    require(states >= 1 && length >= 1, ErrorKind::model, "chain needs K >= 1 states and length >= 1");
    require(initial.size() == states, ErrorKind::model, "initial law has wrong length");
    check_distribution(initial, "initial law");
    require(transitions.size() == length - 1, ErrorKind::model, "chain needs length - 1 transition matrices");
    for (std::size_t t = 0; t < transitions.size(); ++t) {
        require(transitions[t].size() == states * states, ErrorKind::model, "transition matrix has wrong size");
        for (std::size_t a = 0; a < states; ++a)
            check_distribution(std::span(transitions[t]).subspan(a * states, states),
                               "transition " + std::to_string(t) + " row " + std::to_string(a));
    }
}

bool MarkovChainModel::strictly_positive() const noexcept {
    for (double v : initial)
        if (!(v > 0.0)) return false;
    for (const auto& t : transitions)
        for (double v : t)
            if (!(v > 0.0)) return false;
    return true;
}

std::vector<double> MarkovChainModel::marginal(std::size_t j) const {
    require(j < length, ErrorKind::contract, "marginal position out of range");
    std::vector<double> p = initial;
    for (std::size_t t = 0; t < j; ++t) {
        std::vector<double> q(states, 0.0);
        for (std::size_t a = 0; a < states; ++a)
            for (std::size_t b = 0; b < states; ++b) q[b] += p[a] * transition(t, a, b);
        p = std::move(q);
    }
    return p;
}

std::vector<double> MarkovChainModel::pair_marginal(std::size_t a, std::size_t b) const {
    require(a < b && b < length, ErrorKind::contract, "pair_marginal needs a < b < length");
    const auto pa = marginal(a);
    std::vector<double> table(states * states, 0.0);
    for (std::size_t s = 0; s < states; ++s) {
        std::vector<double> p(states, 0.0);
        p[s] = pa[s];
        for (std::size_t t = a; t < b; ++t) {
            std::vector<double> q(states, 0.0);
            for (std::size_t u = 0; u < states; ++u)
                for (std::size_t v = 0; v < states; ++v) q[v] += p[u] * transition(t, u, v);
            p = std::move(q);
        }
        for (std::size_t v = 0; v < states; ++v) table[s * states + v] = p[v];
    }
    return table;
}

double MarkovChainModel::probability(std::span<const std::size_t> path) const {
    require(path.size() == length, ErrorKind::dimension, "path length differs from chain length");
    double p = initial[path[0]];
    for (std::size_t t = 0; t + 1 < length; ++t) p *= transition(t, path[t], path[t + 1]);
    return p;
}

void IndependentModel::validate() const {
    require(!marginals.empty(), ErrorKind::model, "independent model needs d >= 1 marginals");
    for (std::size_t j = 0; j < marginals.size(); ++j) {
        require(marginals[j].size() == states, ErrorKind::model, "marginal has wrong length");
        check_distribution(marginals[j], "marginal " + std::to_string(j));
    }
}

MarkovChainModel IndependentModel::as_chain() const {
    validate();
    MarkovChainModel m;
    m.states = states;
    m.length = marginals.size();
    m.initial = marginals[0];
    for (std::size_t t = 0; t + 1 < m.length; ++t) {
        Transition tr;
        tr.reserve(states * states);
        for (std::size_t a = 0; a < states; ++a) tr.insert(tr.end(), marginals[t + 1].begin(), marginals[t + 1].end());
        m.transitions.push_back(std::move(tr));
    }
    return m;
}

MarkovChainModel sticky_chain(std::size_t length, std::span<const double> stationary, double stay) {
    require(length >= 1, ErrorKind::config, "chain length must be positive");
    require(stay >= 0.0 && stay < 1.0, ErrorKind::config, "stay probability must lie in [0, 1)");
    MarkovChainModel m;
    m.states = stationary.size();
    m.length = length;
    m.initial.assign(stationary.begin(), stationary.end());
    Transition tr(m.states * m.states);
    for (std::size_t a = 0; a < m.states; ++a)
        for (std::size_t b = 0; b < m.states; ++b)
            tr[a * m.states + b] = (1.0 - stay) * stationary[b] + (a == b ? stay : 0.0);
    m.transitions.assign(length - 1, tr);
    m.validate();
    return m;
}

MarkovChainModel fit_markov(const FeatureMatrix& x, std::size_t states, double smoothing) {
    require(x.rows() >= 1 && x.cols() >= 1, ErrorKind::data, "fit_markov needs a nonempty matrix");
    require(states >= 1, ErrorKind::config, "state count must be positive");
    require(smoothing >= 0.0, ErrorKind::config, "smoothing must be nonnegative");
    const std::size_t K = states;
    const std::size_t d = x.cols();

    std::vector<double> init_counts(K, 0.0);
    std::vector<std::vector<double>> counts(d - 1, std::vector<double>(K * K, 0.0));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto s = row_states(x, i, K);
        init_counts[s[0]] += 1.0;
        for (std::size_t t = 0; t + 1 < d; ++t) counts[t][s[t] * K + s[t + 1]] += 1.0;
    }

    MarkovChainModel m;
    m.states = K;
    m.length = d;
    m.initial.resize(K);
    const double n = static_cast<double>(x.rows());
    for (std::size_t k = 0; k < K; ++k) m.initial[k] = (init_counts[k] + smoothing) / (n + K * smoothing);
    for (std::size_t t = 0; t + 1 < d; ++t) {
        Transition tr(K * K);
        for (std::size_t a = 0; a < K; ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < K; ++b) row += counts[t][a * K + b];
            const double denom = row + K * smoothing;
            for (std::size_t b = 0; b < K; ++b)
                tr[a * K + b] = denom > 0.0 ? (counts[t][a * K + b] + smoothing) / denom : 1.0 / static_cast<double>(K);
        }
        m.transitions.push_back(std::move(tr));
    }
    return m;
}

FeatureMatrix sample_markov(const MarkovChainModel& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    require(n >= 1, ErrorKind::config, "sample count must be positive");
    const std::size_t K = model.states;
    FeatureMatrix out(n, model.length);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng(seed, {i});
        std::size_t s = rng.categorical(model.initial);
        out(i, 0) = static_cast<double>(s);
        for (std::size_t t = 0; t + 1 < model.length; ++t) {
            s = rng.categorical(std::span(model.transitions[t]).subspan(s * K, K));
            out(i, t + 1) = static_cast<double>(s);
        }
    }
    return out;
}

FeatureMatrix knockoff_markov(const MarkovChainModel& model, const FeatureMatrix& x, std::uint64_t seed) {
    model.validate();
    require(model.strictly_positive(), ErrorKind::model, "knockoff sampling needs a strictly positive model");
    require(x.cols() == model.length, ErrorKind::dimension, "feature count differs from chain length");
    FeatureMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto s = row_states(x, i, model.states);
        Stream rng(seed, {i});
        SequentialSampler sampler(model, s);
        for (std::size_t j = 0; j < model.length; ++j) {
            const std::size_t k = rng.categorical(sampler.next());
            out(i, j) = static_cast<double>(k);
            sampler.advance(k);
        }
    }
    return out;
}

FeatureMatrix knockoff_independent(const IndependentModel& model, const FeatureMatrix& x, std::uint64_t seed) {
    model.validate();
    require(x.cols() == model.marginals.size(), ErrorKind::dimension, "feature count differs from model");
    FeatureMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Stream rng(seed, {i});
        for (std::size_t j = 0; j < x.cols(); ++j) {
            state_of(x(i, j), model.states);
            out(i, j) = static_cast<double>(rng.categorical(model.marginals[j]));
        }
    }
    return out;
}

KnockoffConditional sequential_conditional(const MarkovChainModel& model) {
    return [model](std::span<const std::size_t> x, std::span<const std::size_t> prefix) {
        SequentialSampler sampler(model, x);
        for (auto k : prefix) {
            sampler.next();
            sampler.advance(k);
        }
        const auto law = sampler.next();
        return std::vector<double>(law.begin(), law.end());
    };
}

std::size_t JointPmf::outcomes_per_side() const noexcept {
    std::size_t n = 1;
    for (std::size_t j = 0; j < length; ++j) n *= states;
    return n;
}

double JointPmf::total() const noexcept {
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
}

std::vector<std::size_t> decode_path(std::size_t code, std::size_t states, std::size_t length) {
    std::vector<std::size_t> path(length);
    for (std::size_t j = 0; j < length; ++j) {
        path[j] = code % states;
        code /= states;
    }
    return path;
}

JointPmf exact_joint_pmf(const MarkovChainModel& model, KnockoffConditional conditional) {
    model.validate();
    const std::size_t K = model.states;
    const std::size_t d = model.length;
    require(checked_power(K, 2 * d, max_pmf_cells) <= max_pmf_cells, ErrorKind::size,
            "exact pmf needs K^(2d) <= 1e7");
    if (!conditional) conditional = sequential_conditional(model);

    JointPmf pmf;
    pmf.states = K;
    pmf.length = d;
    const std::size_t side = pmf.outcomes_per_side();
    pmf.mass.assign(side * side, 0.0);

    std::vector<std::size_t> weights(d, 1);
    for (std::size_t j = 1; j < d; ++j) weights[j] = weights[j - 1] * K;

    std::vector<std::size_t> prefix;
    prefix.reserve(d);
    for (std::size_t xc = 0; xc < side; ++xc) {
        const auto x = decode_path(xc, K, d);
        const double px = model.probability(x);
        // Depth-first enumeration of knockoff paths.
        auto recurse = [&](auto&& self, double mass, std::size_t code) -> void {
            const std::size_t j = prefix.size();
            if (j == d) {
                pmf.mass[xc * side + code] += mass;
                return;
            }
            const auto law = conditional(x, prefix);
            for (std::size_t k = 0; k < K; ++k) {
                if (law[k] == 0.0) continue;
                prefix.push_back(k);
                self(self, mass * law[k], code + k * weights[j]);
                prefix.pop_back();
            }
        };
        recurse(recurse, px, 0);
    }
    return pmf;
}

JointPmf swap_pmf(const JointPmf& pmf, const IndexSet& swapped) {
    const std::size_t K = pmf.states;
    const std::size_t d = pmf.length;
    require(swapped.max_plus_one() <= d, ErrorKind::contract, "swap index out of range");
    const std::size_t side = pmf.outcomes_per_side();
    std::vector<std::size_t> weights(d, 1);
    for (std::size_t j = 1; j < d; ++j) weights[j] = weights[j - 1] * K;

    JointPmf out = pmf;
    std::fill(out.mass.begin(), out.mass.end(), 0.0);
    for (std::size_t xc = 0; xc < side; ++xc) {
        for (std::size_t kc = 0; kc < side; ++kc) {
            std::size_t a = xc;
            std::size_t b = kc;
            for (auto j : swapped) {
                const std::size_t da = (xc / weights[j]) % K;
                const std::size_t db = (kc / weights[j]) % K;
                a = a - da * weights[j] + db * weights[j];
                b = b - db * weights[j] + da * weights[j];
            }
            out.mass[a * side + b] += pmf.mass[xc * side + kc];
        }
    }
    return out;
}

double total_variation(const JointPmf& a, const JointPmf& b) {
    require(a.mass.size() == b.mass.size(), ErrorKind::dimension, "pmf tables differ in size");
    double s = 0.0;
    for (std::size_t c = 0; c < a.mass.size(); ++c) s += std::abs(a.mass[c] - b.mass[c]);
    return 0.5 * s;
}

ExchangeabilityReport exchangeability_report(const MarkovChainModel& model, KnockoffConditional conditional) {
    const auto pmf = exact_joint_pmf(model, std::move(conditional));
    ExchangeabilityReport report;
    const std::size_t d = model.length;
    for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t j = 0; j < d; ++j)
            if (mask >> j & 1U) s.push_back(j);
        IndexSet swapped(std::move(s));
        const double tv = total_variation(pmf, swap_pmf(pmf, swapped));
        if (tv > report.max_deviation) {
            report.max_deviation = tv;
            report.worst_swap = swapped;
        }
    }
    return report;
}

} // namespace lko
