#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lko/rng.hpp"

namespace lko::oracle {

MarkovChainModel random_chain(std::size_t states, std::size_t length, std::uint64_t seed) {
    Stream rng(seed, {0xc4a1});
    auto draw_row = [&] {
        std::vector<double> row(states);
        double total = 0.0;
        for (auto& v : row) total += (v = 0.05 + rng.uniform());
        for (auto& v : row) v /= total;
        return row;
    };
    MarkovChainModel m;
    m.states = states;
    m.length = length;
    m.initial = draw_row();
    for (std::size_t t = 0; t + 1 < length; ++t) {
        Transition tr;
        for (std::size_t a = 0; a < states; ++a) {
            auto row = draw_row();
            tr.insert(tr.end(), row.begin(), row.end());
        }
        m.transitions.push_back(std::move(tr));
    }
    return m;
}

namespace {

// Probability that the first j knockoff coordinates equal `prefix`
// given the original path x.
double prefix_probability(const MarkovChainModel& model, const std::vector<std::size_t>& x,
                          const std::vector<std::size_t>& prefix, std::size_t j);

std::vector<double> conditional_at(const MarkovChainModel& model, const std::vector<std::size_t>& x,
                                   const std::vector<std::size_t>& prefix, std::size_t j) {
    std::vector<double> w(model.states);
    double total = 0.0;
    for (std::size_t k = 0; k < model.states; ++k) {
        auto alt = x;
        alt[j] = k;
        w[k] = model.probability(alt) * prefix_probability(model, alt, prefix, j);
        total += w[k];
    }
    for (auto& v : w) v /= total;
    return w;
}

double prefix_probability(const MarkovChainModel& model, const std::vector<std::size_t>& x,
                          const std::vector<std::size_t>& prefix, std::size_t j) {
    double p = 1.0;
    for (std::size_t i = 0; i < j; ++i) p *= conditional_at(model, x, prefix, i)[prefix[i]];
    return p;
}

} // namespace

KnockoffConditional brute_force_conditional(const MarkovChainModel& model) {
    return [model](std::span<const std::size_t> x, std::span<const std::size_t> prefix) {
        const std::vector<std::size_t> xv(x.begin(), x.end());
        const std::vector<std::size_t> pv(prefix.begin(), prefix.end());
        return conditional_at(model, xv, pv, pv.size());
    };
}

KnockoffConditional marginal_resampling(const MarkovChainModel& model) {
    std::vector<std::vector<double>> marginals;
    for (std::size_t j = 0; j < model.length; ++j) marginals.push_back(model.marginal(j));
    return [marginals](std::span<const std::size_t>, std::span<const std::size_t> prefix) {
        return marginals[prefix.size()];
    };
}

double grid_threshold(std::span<const double> w, double q) {
    std::vector<double> mags;
    for (double v : w)
        if (v != 0.0) mags.push_back(std::abs(v));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    if (mags.empty()) return std::numeric_limits<double>::infinity();
    double spacing = mags.front();
    for (std::size_t k = 1; k < mags.size(); ++k) spacing = std::min(spacing, mags[k] - mags[k - 1]);
    spacing /= 2.0;
    for (std::size_t step = 1;; ++step) {
        const double t = spacing * static_cast<double>(step);
        if (t > mags.back()) break;
        std::size_t neg = 0, pos = 0;
        for (double v : w) {
            if (v <= -t) ++neg;
            if (v >= t) ++pos;
        }
        if (pos > 0 && (1.0 + static_cast<double>(neg)) / static_cast<double>(pos) <= q)
            return *std::lower_bound(mags.begin(), mags.end(), t);
    }
    return std::numeric_limits<double>::infinity();
}

std::vector<double> law_with_response(const JointPmf& pmf, const ResponseLaw& law) {
    const std::size_t side = pmf.outcomes_per_side();
    std::vector<double> out(pmf.mass.size() * 2, 0.0);
    for (std::size_t cell = 0; cell < pmf.mass.size(); ++cell) {
        const auto x = decode_path(cell / side, pmf.states, pmf.length);
        const double p1 = law(x);
        out[2 * cell] += pmf.mass[cell] * (1.0 - p1);
        out[2 * cell + 1] += pmf.mass[cell] * p1;
    }
    return out;
}

std::vector<double> swapped_law_with_response(const JointPmf& pmf, const ResponseLaw& law, const SwapMap& sigma) {
    const std::size_t side = pmf.outcomes_per_side();
    std::vector<double> out(pmf.mass.size() * 2, 0.0);
    auto encode = [&](const std::vector<double>& v) {
        std::size_t code = 0, base = 1;
        for (double s : v) {
            code += static_cast<std::size_t>(s) * base;
            base *= pmf.states;
        }
        return code;
    };
    for (std::size_t cell = 0; cell < pmf.mass.size(); ++cell) {
        const auto x = decode_path(cell / side, pmf.states, pmf.length);
        const auto xk = decode_path(cell % side, pmf.states, pmf.length);
        const std::vector<double> xd(x.begin(), x.end()), xkd(xk.begin(), xk.end());
        const auto [sx, sxk] = apply_swap(xd, xkd, sigma);
        const std::size_t target = encode(sx) * side + encode(sxk);
        const double p1 = law(x);
        out[2 * target] += pmf.mass[cell] * (1.0 - p1);
        out[2 * target + 1] += pmf.mass[cell] * p1;
    }
    return out;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

} // namespace lko::oracle
