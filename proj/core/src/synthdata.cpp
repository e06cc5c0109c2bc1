#include "lko/synthdata.hpp"

#include <cmath>

#include "lko/rng.hpp"

namespace lko {

namespace {

double sigmoid(double eta) noexcept { return 1.0 / (1.0 + std::exp(-eta)); }

} // namespace

std::size_t SwitchDesign::branch_of(std::span<const double> x) const noexcept {
    return 2 * static_cast<std::size_t>(x[switch1] > cutoff) + static_cast<std::size_t>(x[switch2] > cutoff);
}

IndexSet SwitchDesign::global_nonnulls() const {
    std::vector<std::size_t> v{switch1, switch2};
    for (const auto& q : quarters) v.insert(v.end(), q.begin(), q.end());
    return IndexSet(std::move(v));
}

double SwitchDesign::success_probability(std::span<const double> x) const {
    require(x.size() == dim, ErrorKind::dimension, "sample length differs from design dimension");
    double eta = 0.0;
    for (auto j : quarters[branch_of(x)]) eta += signs[j] * amplitude * (x[j] - 1.0);
    return sigmoid(eta);
}

SwitchDesign build_design(std::size_t dim, std::size_t q_total, std::uint64_t seed) {
    require(q_total >= 6 && (q_total - 2) % 4 == 0, ErrorKind::config,
            "q_total must be at least 6 with q_total - 2 divisible by 4");
    require(q_total <= dim, ErrorKind::config, "q_total exceeds the dimension");
    Stream rng(seed, {0x64657369676eULL});
    const auto perm = rng.permutation(dim);

    SwitchDesign d;
    d.dim = dim;
    d.seed = seed;
    d.switch1 = perm[0];
    d.switch2 = perm[1];
    const std::size_t m = (q_total - 2) / 4;
    constexpr std::array<std::size_t, 4> chunk_branch{3, 2, 1, 0};
    for (std::size_t chunk = 0; chunk < 4; ++chunk)
        for (std::size_t k = 0; k < m; ++k) d.quarters[chunk_branch[chunk]].push_back(perm[2 + chunk * m + k]);
    d.signs.assign(dim, 0);
    for (const auto& q : d.quarters)
        for (auto j : q) d.signs[j] = rng.bernoulli(0.5) ? 1 : -1;
    d.amplitude = 8.0 / std::sqrt(static_cast<double>(m));
    return d;
}

Response generate_response(const FeatureMatrix& x, const SwitchDesign& design, std::uint64_t seed) {
    require(x.cols() == design.dim, ErrorKind::dimension, "feature count differs from design dimension");
    require(x.is_genotype(), ErrorKind::data, "response generator expects genotype values in {0,1,2}");
    Response y(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Stream rng(seed, {i});
        y[i] = rng.bernoulli(design.success_probability(x.row(i))) ? 1 : 0;
    }
    return y;
}

LocalNulls oracle_local_nulls(const SwitchDesign& design, const Region& region) {
    require(region.dim() == design.dim, ErrorKind::dimension, "region dimension differs from design dimension");
    require(region.radius > 0.0, ErrorKind::config, "region radius must be positive");
    // Which bit values of a switch are reachable inside [z - r, z + r].
    auto reach = [&](std::size_t s) {
        const double z = region.center[s];
        return std::array<bool, 2>{z - region.radius <= design.cutoff, z + region.radius > design.cutoff};
    };
    const auto r1 = reach(design.switch1);
    const auto r2 = reach(design.switch2);

    std::vector<std::size_t> nonnull;
    if (r1[0] && r1[1]) nonnull.push_back(design.switch1);
    if (r2[0] && r2[1]) nonnull.push_back(design.switch2);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            if (r1[a] && r2[b]) {
                const auto& q = design.quarters[2 * a + b];
                nonnull.insert(nonnull.end(), q.begin(), q.end());
            }
    LocalNulls out;
    out.nonnulls = IndexSet(std::move(nonnull));
    out.nulls = out.nonnulls.complement(design.dim);
    return out;
}

GroundTruth ground_truth(const SwitchDesign& design) {
    GroundTruth t;
    t.global_nonnulls = design.global_nonnulls();
    for (std::size_t b = 0; b < 4; ++b) t.branch_active[b] = IndexSet(design.quarters[b]);
    return t;
}

ExperimentData generate_experiment_dataset(const MarkovChainModel& model, const SwitchDesign& design, std::size_t n,
                                           std::uint64_t seed) {
    require(n >= 1, ErrorKind::config, "sample count must be positive");
    require(model.length == design.dim, ErrorKind::dimension, "chain length differs from design dimension");
    auto x = sample_markov(model, n, derive_seed(seed, {1}));
    auto x_knock = knockoff_markov(model, x, derive_seed(seed, {2}));
    auto y = generate_response(x, design, derive_seed(seed, {3}));
    return ExperimentData{PairedDataset(std::move(x), std::move(x_knock), std::move(y)), ground_truth(design)};
}

std::array<double, 4> branch_probabilities(const MarkovChainModel& model, const SwitchDesign& design) {
    require(model.states == 3, ErrorKind::model, "branch probabilities need a genotype chain");
    const std::size_t a = std::min(design.switch1, design.switch2);
    const std::size_t b = std::max(design.switch1, design.switch2);
    const auto table = model.pair_marginal(a, b);
    std::array<double, 4> out{};
    for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t v = 0; v < 3; ++v) {
            const std::size_t xa = u, xb = v;
            const std::size_t s1 = design.switch1 == a ? xa : xb;
            const std::size_t s2 = design.switch1 == a ? xb : xa;
            const std::size_t code = 2 * static_cast<std::size_t>(static_cast<double>(s1) > design.cutoff) +
                                     static_cast<std::size_t>(static_cast<double>(s2) > design.cutoff);
            out[code] += table[u * 3 + v];
        }
    return out;
}

} // namespace lko
