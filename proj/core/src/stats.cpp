#include "lko/stats.hpp"

#include <cmath>
#include <vector>

#include "lko/error.hpp"

namespace lko {

namespace {

std::vector<double> binomial_pmf(std::uint64_t n, double p) {
    std::vector<double> pmf(n + 1);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::uint64_t k = 0; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double nk = static_cast<double>(n - k);
        pmf[k] = std::exp(lgn - std::lgamma(kk + 1.0) - std::lgamma(nk + 1.0) + kk * lp + nk * lq);
    }
    return pmf;
}

} // namespace

double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p) {
    require(p > 0.0 && p < 1.0, ErrorKind::config, "binomial probability must lie in (0,1)");
    require(k <= n, ErrorKind::contract, "binomial count exceeds trials");
    if (n == 0) return 1.0;
    const auto pmf = binomial_pmf(n, p);
    // Relative slack absorbs rounding in the log-space pmf so symmetric
    // outcomes are treated as equally likely.
    const double cut = pmf[k] * (1.0 + 1e-7);
    double total = 0.0;
    for (double v : pmf)
        if (v <= cut) total += v;
    return total > 1.0 ? 1.0 : total;
}

CountBand binomial_acceptance_band(std::uint64_t n, double alpha, double p) {
    CountBand band{n, 0};
    for (std::uint64_t k = 0; k <= n; ++k) {
        if (binomial_two_sided_p(k, n, p) >= alpha) {
            if (k < band.lo) band.lo = k;
            band.hi = k;
        }
    }
    return band;
}

double mean(std::span<const double> v) {
    require(!v.empty(), ErrorKind::data, "mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::optional<double> standard_error(std::span<const double> v) {
    if (v.size() < 2) return std::nullopt;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

} // namespace lko
