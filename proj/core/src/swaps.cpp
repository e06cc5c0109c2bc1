#include "lko/swaps.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "lko/stats.hpp"

namespace lko {

bool SwapRule::fires(std::span<const double> x) const noexcept {
    return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(x); });
}

SwapMap::SwapMap(std::size_t dim, std::vector<SwapRule> rules) : dim_(dim), rules_(std::move(rules)) {
    for (const auto& r : rules_) {
        require(r.swapped.max_plus_one() <= dim_, ErrorKind::contract, "swap rule index out of range");
        for (const auto& c : r.conditions)
            require(c.driver < dim_, ErrorKind::contract, "swap rule driver out of range");
    }
}

SwapMap SwapMap::constant(std::size_t dim, IndexSet swapped) {
    return SwapMap(dim, {SwapRule{{}, std::move(swapped)}});
}

IndexSet SwapMap::operator()(std::span<const double> x) const {
    require(x.size() == dim_, ErrorKind::dimension, "swap evaluated on vector of wrong length");
    IndexSet out;
    for (const auto& r : rules_)
        if (r.fires(x)) out = out.unite(r.swapped);
    return out;
}

IndexSet SwapMap::drivers() const {
    std::vector<std::size_t> d;
    for (const auto& r : rules_)
        for (const auto& c : r.conditions) d.push_back(c.driver);
    return IndexSet(std::move(d));
}

VectorPair apply_swap(std::span<const double> x, std::span<const double> x_knock, const SwapMap& sigma) {
    require(x.size() == x_knock.size(), ErrorKind::dimension, "apply_swap: length mismatch");
    VectorPair out{{x.begin(), x.end()}, {x_knock.begin(), x_knock.end()}};
    for (auto j : sigma(x)) std::swap(out.first[j], out.second[j]);
    return out;
}

bool is_involution_on_grid(const SwapMap& sigma, std::span<const VectorPair> grid) {
    require(!grid.empty(), ErrorKind::config, "involution check needs a nonempty grid");
    return std::all_of(grid.begin(), grid.end(), [&](const VectorPair& p) {
        const auto once = apply_swap(p.first, p.second, sigma);
        const auto twice = apply_swap(once.first, once.second, sigma);
        return twice == p;
    });
}

std::vector<SwapMap> decompose_swap(const SwapMap& sigma) {
    std::vector<SwapMap> parts;
    parts.reserve(sigma.dim());
    for (std::size_t i = 0; i < sigma.dim(); ++i) {
        std::vector<SwapRule> rules;
        for (const auto& r : sigma.rules())
            if (r.swapped.contains(i)) rules.push_back(SwapRule{r.conditions, IndexSet{i}});
        parts.emplace_back(sigma.dim(), std::move(rules));
    }
    return parts;
}

RestrictedSwap::RestrictedSwap(SwapMap base, double radius) : base_(std::move(base)), radius_(radius) {
    require(radius_ > 0.0, ErrorKind::config, "restriction radius must be positive");
}

bool RestrictedSwap::in_stable_set(std::span<const double> z) const {
    require(z.size() == base_.dim(), ErrorKind::dimension, "restricted swap evaluated on vector of wrong length");

    // The cutoffs on one driver cut the line into cells (-inf, c1], (c1, c2], ...,
    // (cm, inf); every condition on that driver is constant on each cell. For each
    // driver keep one point of every cell that meets [z - r, z + r].
    std::map<std::size_t, std::vector<double>> cutoffs;
    for (const auto& r : base_.rules())
        for (const auto& c : r.conditions) cutoffs[c.driver].push_back(c.cutoff);

    std::vector<std::size_t> drivers;
    std::vector<std::vector<double>> reps;
    for (auto& [driver, cuts] : cutoffs) {
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        const double lo = z[driver] - radius_;
        const double hi = z[driver] + radius_;
        std::vector<double> pts;
        double left = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= cuts.size(); ++k) {
            const double right = k < cuts.size() ? cuts[k] : std::numeric_limits<double>::infinity();
            if (left < hi && right >= lo) pts.push_back(std::min(right, hi));
            left = right;
        }
        drivers.push_back(driver);
        reps.push_back(std::move(pts));
    }

    const IndexSet at_center = base_(z);
    std::vector<double> y(z.begin(), z.end());
    std::vector<std::size_t> pos(drivers.size(), 0);
    while (true) {
        for (std::size_t k = 0; k < drivers.size(); ++k) y[drivers[k]] = reps[k][pos[k]];
        if (base_(y) != at_center) return false;
        std::size_t k = 0;
        while (k < pos.size() && ++pos[k] == reps[k].size()) pos[k++] = 0;
        if (k == pos.size()) return true;
    }
}

IndexSet RestrictedSwap::operator()(std::span<const double> z) const {
    return in_stable_set(z) ? base_(z) : IndexSet{};
}

RestrictedSwap restrict_swap(const SwapMap& sigma, double radius) { return RestrictedSwap(sigma, radius); }

std::vector<SignBalance> flip_sign_check(std::span<const std::vector<double>> w_samples, const IndexSet& null_set) {
    require(w_samples.size() >= 30, ErrorKind::config, "flip-sign check needs at least 30 samples");
    std::vector<SignBalance> out;
    for (auto j : null_set) {
        SignBalance b;
        b.feature = j;
        for (const auto& w : w_samples) {
            require(j < w.size(), ErrorKind::dimension, "W sample shorter than null index");
            if (w[j] != 0.0) {
                ++b.nonzero;
                if (w[j] > 0.0) ++b.positives;
            }
        }
        b.degenerate = b.nonzero == 0;
        if (!b.degenerate) {
            b.fraction = static_cast<double>(b.positives) / static_cast<double>(b.nonzero);
            b.p_value = binomial_two_sided_p(b.positives, b.nonzero);
        }
        out.push_back(b);
    }
    return out;
}

} // namespace lko
