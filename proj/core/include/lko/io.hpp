#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lko/core.hpp"
#include "lko/experiment.hpp"
#include "lko/filter.hpp"
#include "lko/local_selection.hpp"
#include "lko/markov.hpp"
#include "lko/partition.hpp"
#include "lko/swaps.hpp"
#include "lko/synthdata.hpp"

namespace lko {

using json = nlohmann::json;

// CSV matrices: header `x1,...,xd[,y]`, one sample per line, '.' decimals.

struct CsvTable {
    FeatureMatrix x;
    std::optional<Response> y;
};

void write_matrix_csv(std::ostream& out, const FeatureMatrix& x, const Response* y = nullptr);
void write_matrix_csv(const std::filesystem::path& path, const FeatureMatrix& x, const Response* y = nullptr);
/// Format error (with 1-based line number) on malformed input.
CsvTable read_matrix_csv(std::istream& in);
CsvTable read_matrix_csv(const std::filesystem::path& path);

/// Long-format run records: `n,L,region,run,fdp,power`, 17 significant digits.
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

json to_json(const MarkovChainModel& m);
MarkovChainModel chain_from_json(const json& j);

json to_json(const SwapMap& s);
SwapMap swap_map_from_json(const json& j);

/// `tau` is null when the threshold is +inf.
json to_json(const SelectionResult& r);
json to_json(const std::vector<SelectionResult>& rs);

json to_json(const RegionPlan& p);
RegionPlan plan_from_json(const json& j);

json to_json(const PartitionTree& t);

json to_json(const SwitchDesign& d);
SwitchDesign design_from_json(const json& j);
json to_json(const GroundTruth& t);

json to_json(const RunConfig& c);
/// Missing keys keep their defaults; `n` may be a number or a list.
RunConfig run_config_from_json(const json& j);

json to_json(const AggregateReport& r, const RunConfig& c);

} // namespace lko
