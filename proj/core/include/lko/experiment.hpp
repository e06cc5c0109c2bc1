#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lko/importance.hpp"
#include "lko/local_selection.hpp"
#include "lko/markov.hpp"
#include "lko/synthdata.hpp"

namespace lko {

/// Parameters of the Monte Carlo harness.
struct RunConfig {
    std::size_t d = 50;
    std::vector<std::size_t> n_sweep{500, 1000, 2000, 4000};
    double q = 0.2;
    std::size_t q_total = 18;
    std::vector<std::size_t> levels{1, 2, 4};
    double radius = 1.0;
    std::size_t runs = 20;
    std::uint64_t seed = 1;
    ScoreConfig scores{ScoreMethod::logistic, LogisticFitConfig{}};
    std::string out_dir = "out";
    // Genotype chain: homogeneous sticky chain over {0,1,2}. The default
    // stationary law has mean 1, so the centered effects (x - 1) carry no
    // main effect of the switches.
    std::vector<double> stationary{0.4, 0.2, 0.4};
    double stay = 0.5;
    std::size_t workers = 0;

    /// Full-size setting: d = 200.
    static constexpr std::size_t paper_dim = 200;

    void validate() const;
    MarkovChainModel chain() const;
};

/// Centers for L = 1, 2 or 4 regions aligned with the design's branches.
/// Non-switch coordinates sit at 1 so a radius >= 1 ball covers every
/// genotype there; a switch fixed low sits at cutoff - r (ball top touches the
/// cutoff from below), fixed high at cutoff + 1.1 r (ball strictly above).
/// Regions are listed in branch order: L = 2 by s_1 bit, L = 4 by branch code.
RegionPlan oracle_plan(const SwitchDesign& design, std::size_t level, double radius, const ScoreConfig& scores);

/// For a fine region (branch code 0..3), the index of the L-level region covering it.
std::size_t covering_region(std::size_t level, std::size_t fine_region);

struct RunRecord {
    std::size_t n = 0;
    std::size_t level = 0;
    std::size_t region = 0;
    std::size_t run = 0;
    double fdp = 0.0;
    double power = 0.0;

    bool operator==(const RunRecord&) const = default;
};

struct CellStats {
    std::size_t count = 0;
    double mean_fdp = 0.0;
    double mean_power = 0.0;
    std::optional<double> se_fdp;  // empty when count == 1
    std::optional<double> se_power;
};

/// Cell key: (n, level, region).
using CellKey = std::tuple<std::size_t, std::size_t, std::size_t>;

struct AggregateReport {
    std::map<CellKey, CellStats> cells;
    std::vector<RunRecord> records;
};

/// Mean and standard error (sample std / sqrt(runs)) per cell. Data error on empty input.
AggregateReport aggregate_stats(const std::vector<RunRecord>& records);

/// Mean over regions of a level's per-cell means at a given n.
double mean_over_regions(const AggregateReport& report, std::size_t n, std::size_t level, bool power = false);

/// Seed of one (run, n) dataset; independent of how many runs are requested.
std::uint64_t run_seed(std::uint64_t master, std::size_t run, std::size_t n);
/// Design seed of one run (shared across the n sweep).
std::uint64_t design_seed(std::uint64_t master, std::size_t run);

/// For every n and run: fresh dataset, selection at each level with oracle
/// centers, evaluation against the same level's oracle.
AggregateReport run_experiment(const RunConfig& config);

/// Selection at each level, evaluated against the finest (L = 4) oracle in
/// each of the four branch regions.
AggregateReport run_mismatch(const RunConfig& config);

} // namespace lko
