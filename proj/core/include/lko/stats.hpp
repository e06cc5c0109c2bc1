#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace lko {

/// Exact two-sided binomial test p-value for k successes in n trials against
/// success probability p: total mass of outcomes no more likely than k.
/// Returns 1 when n == 0.
double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p = 0.5);

/// Smallest and largest success counts whose two-sided p-value is >= alpha
/// (the exact acceptance band of a level-alpha test).
struct CountBand {
    std::uint64_t lo;
    std::uint64_t hi;
};
CountBand binomial_acceptance_band(std::uint64_t n, double alpha, double p = 0.5);

double mean(std::span<const double> v);

/// Sample standard deviation (n - 1 denominator) divided by sqrt(n);
/// empty optional when fewer than two values.
std::optional<double> standard_error(std::span<const double> v);

} // namespace lko
