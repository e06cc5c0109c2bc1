#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lko/experiment.hpp"
#include "lko/filter.hpp"
#include "lko/local_selection.hpp"
#include "lko/markov.hpp"
#include "lko/rng.hpp"
#include "lko/stats.hpp"
#include "lko/swaps.hpp"
#include "lko/synthdata.hpp"

namespace lko::cli {

namespace {

MarkovChainModel random_chain(Stream& rng, std::size_t states, std::size_t length) {
    auto row = [&] {
        std::vector<double> r(states);
        double total = 0.0;
        for (auto& v : r) total += (v = 0.05 + rng.uniform());
        for (auto& v : r) v /= total;
        return r;
    };
    MarkovChainModel m;
    m.states = states;
    m.length = length;
    m.initial = row();
    for (std::size_t t = 0; t + 1 < length; ++t) {
        Transition tr;
        for (std::size_t a = 0; a < states; ++a) {
            auto r = row();
            tr.insert(tr.end(), r.begin(), r.end());
        }
        m.transitions.push_back(std::move(tr));
    }
    return m;
}

// Scans t on a grid finer than every gap between observed magnitudes.
double scanned_threshold(const std::vector<double>& w, double q) {
    std::vector<double> mags;
    for (double v : w)
        if (v != 0.0) mags.push_back(std::abs(v));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    if (mags.empty()) return no_threshold;
    double h = mags.front();
    for (std::size_t k = 1; k < mags.size(); ++k) h = std::min(h, mags[k] - mags[k - 1]);
    h /= 2.0;
    for (std::size_t s = 1; h * static_cast<double>(s) <= mags.back(); ++s) {
        const double t = h * static_cast<double>(s);
        std::size_t neg = 0, pos = 0;
        for (double v : w) {
            neg += v <= -t;
            pos += v >= t;
        }
        if (pos > 0 && (1.0 + static_cast<double>(neg)) / static_cast<double>(pos) <= q)
            return *std::lower_bound(mags.begin(), mags.end(), t);
    }
    return no_threshold;
}

CheckResult check_exchangeability(std::uint64_t seed, std::size_t models) {
    Stream rng(seed, {0xe1});
    double worst = 0.0;
    for (std::size_t k = 0; k < models; ++k) {
        const std::size_t states = 2 + rng.below(2), length = 1 + rng.below(4);
        worst = std::max(worst, exchangeability_report(random_chain(rng, states, length)).max_deviation);
    }
    std::ostringstream msg;
    msg << models << " random chains (d <= 4, K <= 3), max TV over all swaps = " << worst;
    return {"exchangeability", worst <= 1e-10, msg.str()};
}

CheckResult check_threshold(std::uint64_t seed, std::size_t vectors) {
    Stream rng(seed, {0xe2});
    std::size_t agree = 0;
    for (std::size_t k = 0; k < vectors; ++k) {
        std::vector<double> w(5 + rng.below(40));
        const bool integer = rng.bernoulli(0.5);
        for (auto& v : w) {
            const double mag = integer ? static_cast<double>(rng.below(6)) : 5.0 * rng.uniform();
            v = rng.bernoulli(0.6) ? mag : -mag;
        }
        const double q = 0.05 + 0.5 * rng.uniform();
        agree += knockoff_threshold(w, q) == scanned_threshold(w, q);
    }
    const bool examples = knockoff_threshold(std::vector<double>{3, 2, -1, 5}, 0.5) == 2.0 &&
                          knockoff_threshold(std::vector<double>{5, 4, 3, 2, 1, -1}, 0.2) == no_threshold &&
                          select_features(std::vector<double>{5, 4, 3, 2, 1, -1}, 0.25).selected == IndexSet{0, 1, 2, 3};
    std::ostringstream msg;
    msg << agree << "/" << vectors << " vectors agree with the grid scan; worked examples "
        << (examples ? "reproduce" : "DIFFER");
    return {"threshold", agree == vectors && examples, msg.str()};
}

CheckResult check_flip_sign(std::uint64_t seed, const VerifyOptions& o) {
    RunConfig config;
    config.d = o.flip_d;
    const auto chain = config.chain();
    const auto design = build_design(o.flip_d, 6, derive_seed(seed, {0xe3}));
    const auto nulls = design.global_nonnulls().complement(o.flip_d);
    std::vector<std::vector<double>> samples;
    for (std::size_t rep = 0; rep < o.flip_reps; ++rep) {
        const auto ex = generate_experiment_dataset(chain, design, o.flip_n, derive_seed(seed, {0xe4, rep}));
        samples.push_back(knockoff_filter(ex.data, config.scores, config.q, 0).w);
    }
    std::uint64_t pos = 0, nonzero = 0;
    std::size_t outside = 0, tested = 0;
    for (const auto& b : flip_sign_check(samples, nulls)) {
        if (b.degenerate) continue;
        ++tested;
        pos += b.positives;
        nonzero += b.nonzero;
        outside += b.p_value < 0.01;
    }
    const double pooled = binomial_two_sided_p(pos, nonzero);
    std::ostringstream msg;
    msg << tested << " null features x " << o.flip_reps << " reps: pooled positive fraction "
        << static_cast<double>(pos) / static_cast<double>(std::max<std::uint64_t>(nonzero, 1)) << ", p = " << pooled
        << "; " << outside << " features outside their 99% band";
    return {"flip-sign", pooled >= 0.01, msg.str()};
}

} // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed, const VerifyOptions& options) {
    return {check_exchangeability(seed, options.models), check_threshold(seed, options.threshold_vectors),
            check_flip_sign(seed, options)};
}

} // namespace lko::cli
