#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lko::cli {

struct VerifyOptions {
    std::size_t models = 20;            // random chains for the exchangeability check
    std::size_t threshold_vectors = 1000;
    std::size_t flip_reps = 100;
    std::size_t flip_n = 1000;
    std::size_t flip_d = 20;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Exchangeability, threshold and flip-sign oracle suites.
std::vector<CheckResult> run_verification(std::uint64_t seed, const VerifyOptions& options);

} // namespace lko::cli
