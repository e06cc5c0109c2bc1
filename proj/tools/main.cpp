#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lko/error.hpp"
#include "lko/experiment.hpp"
#include "lko/io.hpp"
#include "lko/local_selection.hpp"
#include "lko/markov.hpp"
#include "lko/partition.hpp"
#include "lko/rng.hpp"
#include "lko/synthdata.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using namespace lko;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool paper_scale = false;
    std::optional<std::size_t> workers;
};

RunConfig load_config(const Globals& g) {
    RunConfig c = g.config_path.empty() ? RunConfig{} : run_config_from_json(read_json_file(g.config_path));
    if (g.paper_scale) c.d = RunConfig::paper_dim;
    if (g.seed) c.seed = *g.seed;
    if (g.out) c.out_dir = *g.out;
    if (g.workers) c.workers = *g.workers;
    return c;
}

void print_report(const AggregateReport& rep, const char* what) {
    std::printf("%s (mean over runs; se in parentheses)\n", what);
    std::printf("%8s %3s %6s %16s %16s\n", "n", "L", "region", "fdp", "power");
    for (const auto& [key, s] : rep.cells) {
        const auto [n, level, region] = key;
        std::printf("%8zu %3zu %6zu %8.3f (%5.3f) %8.3f (%5.3f)\n", n, level, region, s.mean_fdp, s.se_fdp.value_or(0.0),
                    s.mean_power, s.se_power.value_or(0.0));
    }
}

void write_report(const AggregateReport& rep, const RunConfig& c, const std::string& stem) {
    const fs::path dir(c.out_dir);
    std::ostringstream csv;
    write_records_csv(csv, rep.records);
    write_text_file(dir / (stem + "_records.csv"), csv.str());
    write_json_file(dir / (stem + "_report.json"), to_json(rep, c));
    std::printf("wrote %s and %s\n", (dir / (stem + "_records.csv")).c_str(), (dir / (stem + "_report.json")).c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local knockoff feature selection with r-local FDR control"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--out", g.out, "Output directory");
    app.add_flag("--paper-scale", g.paper_scale, "Use dimension 200");
    app.add_option("--workers", g.workers, "Worker threads (0: all cores)");

    // generate
    auto* gen = app.add_subcommand("generate", "Sample a synthetic dataset with knockoffs and ground truth");
    std::size_t gen_n = 1000;
    std::optional<std::size_t> gen_d, gen_q_total;
    gen->add_option("-n,--n", gen_n, "Sample count")->capture_default_str();
    gen->add_option("--d", gen_d, "Feature count");
    gen->add_option("--q-total", gen_q_total, "Global non-null count (2 switches + 4 quarters)");

    // select
    auto* sel = app.add_subcommand("select", "Run per-region knockoff selection on a plan");
    std::string sel_data, sel_knock, sel_plan;
    std::optional<double> sel_q;
    sel->add_option("--data", sel_data, "CSV with x1..xd,y")->required()->check(CLI::ExistingFile);
    sel->add_option("--knockoffs", sel_knock, "CSV with knockoff columns x1..xd")->required()->check(CLI::ExistingFile);
    sel->add_option("--plan", sel_plan, "Plan JSON {radius, points, method_per_region}")
        ->required()
        ->check(CLI::ExistingFile);
    sel->add_option("--q", sel_q, "Target FDR");

    // partition
    auto* part = app.add_subcommand("partition", "Greedy feature-space partition and representative points");
    std::string part_data;
    std::size_t part_depth = 2, part_min_leaf = 50;
    std::optional<double> part_radius;
    std::vector<std::size_t> part_candidates;
    std::vector<double> part_cutoffs;
    std::optional<std::string> part_method;
    part->add_option("--data", part_data, "CSV with x1..xd,y")->required()->check(CLI::ExistingFile);
    part->add_option("--depth", part_depth, "Levels of splits")->capture_default_str();
    part->add_option("--min-leaf", part_min_leaf, "Minimum rows per leaf")->capture_default_str();
    part->add_option("--radius", part_radius, "Radius for representative points");
    part->add_option("--candidates", part_candidates, "Candidate features (0-based; default all)");
    part->add_option("--cutoffs", part_cutoffs, "Boundary values (default: midpoints of observed values)");
    part->add_option("--method", part_method, "Score method: logistic or perm_drop");

    // experiment / mismatch
    std::optional<std::size_t> runs;
    std::vector<std::size_t> n_sweep, levels;
    auto add_harness_options = [&](CLI::App* sub) {
        sub->add_option("--runs", runs, "Monte Carlo runs");
        sub->add_option("-n,--n", n_sweep, "Sample sizes");
        sub->add_option("-L,--levels", levels, "Resolution levels (1, 2, 4)");
    };
    auto* exp = app.add_subcommand("experiment", "Local FDR and power versus sample size");
    add_harness_options(exp);
    auto* mis = app.add_subcommand("mismatch", "Fine-scale FDR of selections made at each resolution");
    add_harness_options(mis);

    // verify
    auto* ver = app.add_subcommand("verify", "Exchangeability, threshold and flip-sign oracle suites");
    cli::VerifyOptions vopt;
    ver->add_option("--models", vopt.models, "Random chains to check")->capture_default_str();
    ver->add_option("--reps", vopt.flip_reps, "Flip-sign repetitions")->capture_default_str();
    ver->add_option("--flip-n", vopt.flip_n, "Samples per flip-sign repetition")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig config = load_config(g);
        const fs::path out(config.out_dir);

        if (gen->parsed()) {
            if (gen_d) config.d = *gen_d;
            if (gen_q_total) config.q_total = *gen_q_total;
            require(gen_n >= 1, ErrorKind::config, "--n must be at least 1");
            const auto model = config.chain();
            const auto design = build_design(config.d, config.q_total, derive_seed(config.seed, {0}));
            const auto ex = generate_experiment_dataset(model, design, gen_n, derive_seed(config.seed, {1}));
            write_matrix_csv(out / "data.csv", ex.data.x, &ex.data.y);
            write_matrix_csv(out / "knockoffs.csv", ex.data.x_knock);
            write_json_file(out / "model.json", to_json(model));
            json truth = to_json(ex.truth);
            truth["design"] = to_json(design);
            write_json_file(out / "truth.json", truth);
            std::printf("wrote %zu x %zu dataset to %s (data.csv, knockoffs.csv, model.json, truth.json)\n", gen_n,
                        config.d, out.c_str());
        } else if (sel->parsed()) {
            const auto data = read_matrix_csv(fs::path(sel_data));
            const auto knock = read_matrix_csv(fs::path(sel_knock));
            require(data.y.has_value(), ErrorKind::format, sel_data + ": missing y column");
            PairedDataset paired(data.x, knock.x, *data.y);
            auto plan = plan_from_json(read_json_file(sel_plan));
            if (plan.method_per_region.empty()) plan.default_scores.logistic = config.scores.logistic;
            for (const auto& w : validate_plan(plan)) std::fprintf(stderr, "warning: %s\n", w.c_str());
            const auto results =
                run_local_selection(paired, plan, sel_q.value_or(config.q), config.seed, config.workers);
            write_json_file(out / "selection.json", to_json(results));
            for (const auto& r : results) {
                std::printf("region %zu: n=%zu tau=%g selected=[", r.region_id, r.subsample_n, r.threshold);
                bool first = true;
                for (auto j : r.selected) {
                    std::printf(first ? "%zu" : ",%zu", j);
                    first = false;
                }
                std::printf("]%s\n", r.low_data ? " (low data)" : "");
            }
        } else if (part->parsed()) {
            const auto data = read_matrix_csv(fs::path(part_data));
            require(data.y.has_value(), ErrorKind::format, part_data + ": missing y column");
            SplitOptions opt;
            opt.scores = config.scores;
            if (part_method) opt.scores.method = parse_score_method(*part_method);
            opt.seed = config.seed;
            opt.workers = config.workers;
            const IndexSet candidates =
                part_candidates.empty() ? IndexSet::all(data.x.cols()) : IndexSet(part_candidates);
            require(candidates.max_plus_one() <= data.x.cols(), ErrorKind::config, "candidate feature out of range");
            const auto tree = recursive_partition(data.x, *data.y, candidates, part_cutoffs, part_depth, part_min_leaf, opt);
            RegionPlan plan;
            plan.radius = part_radius.value_or(config.radius);
            plan.points = representative_points(tree, data.x, plan.radius);
            plan.default_scores = config.scores;
            write_json_file(out / "tree.json", to_json(tree));
            write_json_file(out / "plan.json", to_json(plan));
            for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
                const auto& nd = tree.nodes[k];
                if (!nd.leaf)
                    std::printf("%*ssplit x%zu at %g (gap %.4f, %zu rows)\n", static_cast<int>(2 * nd.depth), "",
                                nd.feature + 1, nd.cutoff, nd.gap, nd.rows.size());
            }
            std::printf("%zu leaves; plan written to %s\n", plan.points.size(), (out / "plan.json").c_str());
        } else if (exp->parsed() || mis->parsed()) {
            if (runs) config.runs = *runs;
            if (!n_sweep.empty()) config.n_sweep = n_sweep;
            if (!levels.empty()) config.levels = levels;
            if (exp->parsed()) {
                const auto rep = run_experiment(config);
                print_report(rep, "local FDR and power");
                write_report(rep, config, "experiment");
            } else {
                const auto rep = run_mismatch(config);
                print_report(rep, "fine-scale (L = 4) FDR by selection level");
                for (auto n : config.n_sweep)
                    for (auto level : config.levels)
                        std::printf("n=%zu L=%zu mean fine-scale fdp %.3f\n", n, level, mean_over_regions(rep, n, level));
                write_report(rep, config, "mismatch");
            }
            std::printf("target q = %g\n", config.q);
        } else if (ver->parsed()) {
            bool all = true;
            for (const auto& r : cli::run_verification(config.seed, vopt)) {
                std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
                all = all && r.pass;
            }
            return all ? 0 : 4;
        }
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
