#include "lko/experiment.hpp"

#include <algorithm>

#include "lko/filter.hpp"
#include "lko/parallel.hpp"
#include "lko/rng.hpp"
#include "lko/stats.hpp"

namespace lko {

namespace {

bool valid_level(std::size_t l) { return l == 1 || l == 2 || l == 4; }

enum class Evaluation { same_level, finest };

std::vector<RunRecord> evaluate_run(const RunConfig& config, const MarkovChainModel& chain, std::size_t n,
                                    std::size_t run, Evaluation evaluation) {
    const auto design = build_design(config.d, config.q_total, design_seed(config.seed, run));
    const std::uint64_t seed = run_seed(config.seed, run, n);
    const auto ex = generate_experiment_dataset(chain, design, n, seed);
    const auto fine = oracle_plan(design, 4, config.radius, config.scores);

    std::vector<RunRecord> out;
    for (auto level : config.levels) {
        const auto plan = oracle_plan(design, level, config.radius, config.scores);
        const auto results = run_local_selection(ex.data, plan, config.q, derive_seed(seed, {level}));
        if (evaluation == Evaluation::same_level) {
            for (std::size_t l = 0; l < results.size(); ++l) {
                const auto oracle = oracle_local_nulls(design, plan.region(l));
                const auto m = local_eval(results[l], oracle.nulls, oracle.nonnulls);
                out.push_back({n, level, l, run, m.fdp, m.power});
            }
        } else {
            for (std::size_t f = 0; f < 4; ++f) {
                const auto oracle = oracle_local_nulls(design, fine.region(f));
                const auto m = local_eval(results[covering_region(level, f)], oracle.nulls, oracle.nonnulls);
                out.push_back({n, level, f, run, m.fdp, m.power});
            }
        }
    }
    return out;
}

AggregateReport run_harness(const RunConfig& config, Evaluation evaluation) {
    config.validate();
    const auto chain = config.chain();
    const std::size_t runs = config.runs;
    const std::size_t jobs = config.n_sweep.size() * runs;
    std::vector<std::vector<RunRecord>> per_job(jobs);
    parallel_for(
        jobs,
        [&](std::size_t k) {
            per_job[k] = evaluate_run(config, chain, config.n_sweep[k / runs], k % runs, evaluation);
        },
        config.workers);
    std::vector<RunRecord> records;
    for (auto& r : per_job) records.insert(records.end(), r.begin(), r.end());
    return aggregate_stats(records);
}

} // namespace

void RunConfig::validate() const {
    require(q > 0.0 && q < 1.0, ErrorKind::config, "q must lie in (0, 1)");
    require(runs >= 1, ErrorKind::config, "runs must be at least 1");
    require(!n_sweep.empty(), ErrorKind::config, "n sweep is empty");
    for (auto n : n_sweep) require(n >= 1, ErrorKind::config, "sample sizes must be positive");
    require(!levels.empty(), ErrorKind::config, "no resolution levels requested");
    for (auto l : levels) require(valid_level(l), ErrorKind::config, "resolution levels must be 1, 2 or 4");
    require(radius >= 1.0, ErrorKind::config, "harness radius must be at least 1 to cover the genotype range");
    require(q_total <= d, ErrorKind::config, "q_total exceeds d");
    scores.logistic.validate();
}

MarkovChainModel RunConfig::chain() const { return sticky_chain(d, stationary, stay); }

RegionPlan oracle_plan(const SwitchDesign& design, std::size_t level, double radius, const ScoreConfig& scores) {
    require(valid_level(level), ErrorKind::config, "resolution level must be 1, 2 or 4");
    const double low = design.cutoff - radius;
    const double high = design.cutoff + 1.1 * radius;
    RegionPlan plan;
    plan.radius = radius;
    plan.default_scores = scores;
    const std::vector<double> base(design.dim, 1.0);
    for (std::size_t l = 0; l < level; ++l) {
        auto z = base;
        if (level == 2) {
            z[design.switch1] = l == 1 ? high : low;
        } else if (level == 4) {
            z[design.switch1] = (l >> 1) == 1 ? high : low;
            z[design.switch2] = (l & 1) == 1 ? high : low;
        }
        plan.points.push_back(std::move(z));
    }
    return plan;
}

std::size_t covering_region(std::size_t level, std::size_t fine_region) {
    require(fine_region < 4, ErrorKind::contract, "fine region index out of range");
    switch (level) {
    case 1:
        return 0;
    case 2:
        return fine_region >> 1;
    case 4:
        return fine_region;
    default:
        fail(ErrorKind::config, "resolution level must be 1, 2 or 4");
    }
}

AggregateReport aggregate_stats(const std::vector<RunRecord>& records) {
    require(!records.empty(), ErrorKind::data, "no records to aggregate");
    std::map<CellKey, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : records) {
        auto& g = groups[{r.n, r.level, r.region}];
        g.first.push_back(r.fdp);
        g.second.push_back(r.power);
    }
    AggregateReport report;
    report.records = records;
    for (const auto& [key, g] : groups) {
        CellStats c;
        c.count = g.first.size();
        c.mean_fdp = mean(g.first);
        c.mean_power = mean(g.second);
        c.se_fdp = standard_error(g.first);
        c.se_power = standard_error(g.second);
        report.cells.emplace(key, c);
    }
    return report;
}

double mean_over_regions(const AggregateReport& report, std::size_t n, std::size_t level, bool power) {
    double s = 0.0;
    std::size_t k = 0;
    for (const auto& [key, c] : report.cells) {
        if (std::get<0>(key) != n || std::get<1>(key) != level) continue;
        s += power ? c.mean_power : c.mean_fdp;
        ++k;
    }
    require(k > 0, ErrorKind::data, "no cells for the requested (n, level)");
    return s / static_cast<double>(k);
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run, std::size_t n) {
    return derive_seed(master, {0x72756eULL, run, n});
}

std::uint64_t design_seed(std::uint64_t master, std::size_t run) { return derive_seed(master, {0x646573ULL, run}); }

AggregateReport run_experiment(const RunConfig& config) { return run_harness(config, Evaluation::same_level); }

AggregateReport run_mismatch(const RunConfig& config) { return run_harness(config, Evaluation::finest); }

} // namespace lko
