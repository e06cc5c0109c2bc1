#include "lko/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace lko {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double parse_double(const std::string& raw, std::size_t line) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty() && std::isfinite(v), ErrorKind::format,
            "line " + std::to_string(line) + ": '" + s + "' is not a finite number");
    return v;
}

std::size_t parse_count(const std::string& raw, std::size_t line) {
    const std::string s = trim(raw);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorKind::format,
            "line " + std::to_string(line) + ": '" + s + "' is not a nonnegative integer");
    return v;
}

std::string fmt17(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

std::string fmt_value(double v) {
    // Integers (genotypes, labels) print without a fractional part.
    if (v == std::floor(v) && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    return fmt17(v);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<std::size_t> to_vec(const IndexSet& s) { return s.indices(); }

json logistic_json(const LogisticFitConfig& c) {
    return {{"l2_penalty", c.l2_penalty}, {"step_size", c.step_size}, {"iterations", c.iterations}};
}

LogisticFitConfig logistic_from_json(const json& j, LogisticFitConfig base = {}) {
    base.l2_penalty = get_or(j, "l2_penalty", base.l2_penalty);
    base.step_size = get_or(j, "step_size", base.step_size);
    base.iterations = get_or(j, "iterations", base.iterations);
    return base;
}

json node_json(const PartitionTree& t, std::size_t k) {
    const auto& n = t.nodes[k];
    json j{{"n", n.rows.size()}, {"depth", n.depth}};
    if (n.leaf) {
        j["leaf"] = true;
        j["rows"] = n.rows;
    } else {
        j["leaf"] = false;
        j["feature"] = n.feature;
        j["cutoff"] = n.cutoff;
        j["gap"] = n.gap;
        j["low"] = node_json(t, n.low);
        j["high"] = node_json(t, n.high);
    }
    return j;
}

} // namespace

void write_matrix_csv(std::ostream& out, const FeatureMatrix& x, const Response* y) {
    require(y == nullptr || y->size() == x.rows(), ErrorKind::dimension, "label count differs from sample count");
    for (std::size_t j = 0; j < x.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
    if (y) out << ",y";
    out << '\n';
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) out << (j ? "," : "") << fmt_value(x(i, j));
        if (y) out << ',' << (*y)[i];
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const FeatureMatrix& x, const Response* y) {
    std::ostringstream ss;
    write_matrix_csv(ss, x, y);
    write_text_file(path, ss.str());
}

CsvTable read_matrix_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::format, "line 1: missing header");
    const auto header = split_commas(trim(line));
    std::size_t d = header.size();
    bool has_y = false;
    if (d > 0 && trim(header.back()) == "y") {
        has_y = true;
        --d;
    }
    require(d >= 1, ErrorKind::format, "line 1: header names no feature columns");
    for (std::size_t j = 0; j < d; ++j)
        require(trim(header[j]) == "x" + std::to_string(j + 1), ErrorKind::format,
                "line 1: expected column 'x" + std::to_string(j + 1) + "', found '" + trim(header[j]) + "'");

    CsvTable t;
    t.x = FeatureMatrix(0, d);
    if (has_y) t.y.emplace();
    std::vector<double> row(d);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        require(cells.size() == header.size(), ErrorKind::format,
                "line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields, found " +
                    std::to_string(cells.size()));
        for (std::size_t j = 0; j < d; ++j) row[j] = parse_double(cells[j], lineno);
        t.x.append_row(row);
        if (has_y) {
            const double v = parse_double(cells[d], lineno);
            require(v == 0.0 || v == 1.0, ErrorKind::format, "line " + std::to_string(lineno) + ": label must be 0 or 1");
            t.y->push_back(static_cast<int>(v));
        }
    }
    return t;
}

CsvTable read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
    try {
        return read_matrix_csv(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "n,L,region,run,fdp,power\n";
    for (const auto& r : records)
        out << r.n << ',' << r.level << ',' << r.region << ',' << r.run << ',' << fmt17(r.fdp) << ','
            << fmt17(r.power) << '\n';
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && trim(line) == "n,L,region,run,fdp,power", ErrorKind::format,
            "line 1: expected header n,L,region,run,fdp,power");
    std::vector<RunRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto c = split_commas(line);
        require(c.size() == 6, ErrorKind::format, "line " + std::to_string(lineno) + ": expected 6 fields");
        out.push_back({parse_count(c[0], lineno), parse_count(c[1], lineno), parse_count(c[2], lineno),
                       parse_count(c[3], lineno), parse_double(c[4], lineno), parse_double(c[5], lineno)});
    }
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::format, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
    out << text;
    require(static_cast<bool>(out), ErrorKind::io, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json to_json(const MarkovChainModel& m) {
    json tr = json::array();
    for (const auto& t : m.transitions) {
        json mat = json::array();
        for (std::size_t a = 0; a < m.states; ++a)
            mat.push_back(std::vector<double>(t.begin() + static_cast<std::ptrdiff_t>(a * m.states),
                                              t.begin() + static_cast<std::ptrdiff_t>((a + 1) * m.states)));
        tr.push_back(std::move(mat));
    }
    return {{"K", m.states}, {"d", m.length}, {"initial", m.initial}, {"transitions", tr}};
}

MarkovChainModel chain_from_json(const json& j) {
    try {
        MarkovChainModel m;
        m.states = j.at("K").get<std::size_t>();
        m.length = j.at("d").get<std::size_t>();
        m.initial = j.at("initial").get<std::vector<double>>();
        for (const auto& mat : j.at("transitions")) {
            Transition t;
            for (const auto& row : mat) {
                const auto r = row.get<std::vector<double>>();
                t.insert(t.end(), r.begin(), r.end());
            }
            m.transitions.push_back(std::move(t));
        }
        m.validate();
        return m;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("model JSON: ") + e.what());
    }
}

json to_json(const SwapMap& s) {
    json rules = json::array();
    for (const auto& r : s.rules()) {
        json rj{{"swapped", to_vec(r.swapped)}};
        if (r.conditions.size() == 1) {
            const auto& c = r.conditions.front();
            rj["driver"] = c.driver;
            rj["cutoff"] = c.cutoff;
            rj["when"] = c.when == Comparison::gt ? "gt" : "le";
        } else if (r.conditions.size() > 1) {
            json conds = json::array();
            for (const auto& c : r.conditions)
                conds.push_back({{"driver", c.driver}, {"cutoff", c.cutoff}, {"when", c.when == Comparison::gt ? "gt" : "le"}});
            rj["conditions"] = conds;
        }
        rules.push_back(std::move(rj));
    }
    return {{"d", s.dim()}, {"rules", rules}};
}

SwapMap swap_map_from_json(const json& j) {
    auto condition = [](const json& c) {
        const auto when = c.at("when").get<std::string>();
        require(when == "gt" || when == "le", ErrorKind::format, "swap rule 'when' must be \"gt\" or \"le\"");
        return Condition{c.at("driver").get<std::size_t>(), c.at("cutoff").get<double>(),
                         when == "gt" ? Comparison::gt : Comparison::le};
    };
    try {
        std::vector<SwapRule> rules;
        for (const auto& r : j.at("rules")) {
            SwapRule rule;
            rule.swapped = IndexSet(r.at("swapped").get<std::vector<std::size_t>>());
            if (r.contains("driver")) rule.conditions.push_back(condition(r));
            if (r.contains("conditions"))
                for (const auto& c : r.at("conditions")) rule.conditions.push_back(condition(c));
            rules.push_back(std::move(rule));
        }
        return SwapMap(j.at("d").get<std::size_t>(), std::move(rules));
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("swap JSON: ") + e.what());
    }
}

json to_json(const SelectionResult& r) {
    json j{{"region_id", r.region_id},
           {"tau", std::isfinite(r.threshold) ? json(r.threshold) : json(nullptr)},
           {"selected", to_vec(r.selected)},
           {"w", r.w},
           {"subsample_n", r.subsample_n},
           {"low_data", r.low_data}};
    if (r.region) {
        j["center"] = r.region->center;
        j["radius"] = r.region->radius;
    } else {
        j["center"] = nullptr;
        j["radius"] = nullptr;
    }
    return j;
}

json to_json(const std::vector<SelectionResult>& rs) {
    json a = json::array();
    for (const auto& r : rs) a.push_back(to_json(r));
    return a;
}

json to_json(const RegionPlan& p) {
    json methods = json::array();
    for (const auto& m : p.method_per_region) methods.push_back(to_string(m.method));
    return {{"radius", p.radius},
            {"points", p.points},
            {"method_per_region", methods},
            {"default_method", to_string(p.default_scores.method)},
            {"logistic", logistic_json(p.default_scores.logistic)}};
}

RegionPlan plan_from_json(const json& j) {
    try {
        RegionPlan p;
        p.radius = j.at("radius").get<double>();
        p.points = j.at("points").get<std::vector<std::vector<double>>>();
        if (j.contains("logistic")) p.default_scores.logistic = logistic_from_json(j.at("logistic"));
        if (j.contains("default_method"))
            p.default_scores.method = parse_score_method(j.at("default_method").get<std::string>());
        if (j.contains("method_per_region"))
            for (const auto& m : j.at("method_per_region")) {
                ScoreConfig sc = p.default_scores;
                sc.method = parse_score_method(m.get<std::string>());
                p.method_per_region.push_back(sc);
            }
        return p;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("plan JSON: ") + e.what());
    }
}

json to_json(const PartitionTree& t) {
    if (t.nodes.empty()) return nullptr;
    return node_json(t, 0);
}

json to_json(const SwitchDesign& d) {
    json quarters = json::array();
    for (const auto& q : d.quarters) quarters.push_back(q);
    return {{"dim", d.dim},           {"switch1", d.switch1}, {"switch2", d.switch2}, {"quarters", quarters},
            {"signs", d.signs},       {"amplitude", d.amplitude}, {"cutoff", d.cutoff}, {"seed", d.seed}};
}

SwitchDesign design_from_json(const json& j) {
    try {
        SwitchDesign d;
        d.dim = j.at("dim").get<std::size_t>();
        d.switch1 = j.at("switch1").get<std::size_t>();
        d.switch2 = j.at("switch2").get<std::size_t>();
        const auto& q = j.at("quarters");
        require(q.size() == 4, ErrorKind::format, "design JSON needs four quarters");
        for (std::size_t b = 0; b < 4; ++b) d.quarters[b] = q[b].get<std::vector<std::size_t>>();
        d.signs = j.at("signs").get<std::vector<int>>();
        d.amplitude = j.at("amplitude").get<double>();
        d.cutoff = j.at("cutoff").get<double>();
        d.seed = j.at("seed").get<std::uint64_t>();
        return d;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, std::string("design JSON: ") + e.what());
    }
}

json to_json(const GroundTruth& t) {
    json branches = json::object();
    const char* names[4] = {"00", "01", "10", "11"};
    for (std::size_t b = 0; b < 4; ++b) branches[names[b]] = to_vec(t.branch_active[b]);
    return {{"global_nonnulls", to_vec(t.global_nonnulls)}, {"branch_active", branches}};
}

json to_json(const RunConfig& c) {
    return {{"d", c.d},
            {"n", c.n_sweep},
            {"q", c.q},
            {"q_total", c.q_total},
            {"levels", c.levels},
            {"radius", c.radius},
            {"runs", c.runs},
            {"seed", c.seed},
            {"method", to_string(c.scores.method)},
            {"logistic", logistic_json(c.scores.logistic)},
            {"out", c.out_dir},
            {"stationary", c.stationary},
            {"stay", c.stay},
            {"workers", c.workers}};
}

RunConfig run_config_from_json(const json& j) {
    try {
        RunConfig c;
        if (j.value("paper_scale", false)) c.d = RunConfig::paper_dim;
        c.d = get_or(j, "d", c.d);
        if (j.contains("n")) {
            if (j.at("n").is_array())
                c.n_sweep = j.at("n").get<std::vector<std::size_t>>();
            else
                c.n_sweep = {j.at("n").get<std::size_t>()};
        }
        c.q = get_or(j, "q", c.q);
        c.q_total = get_or(j, "q_total", c.q_total);
        if (j.contains("L")) {
            if (j.at("L").is_array())
                c.levels = j.at("L").get<std::vector<std::size_t>>();
            else
                c.levels = {j.at("L").get<std::size_t>()};
        }
        c.levels = get_or(j, "levels", c.levels);
        c.radius = get_or(j, "radius", c.radius);
        c.runs = get_or(j, "runs", c.runs);
        c.seed = get_or(j, "seed", c.seed);
        if (j.contains("method")) c.scores.method = parse_score_method(j.at("method").get<std::string>());
        if (j.contains("logistic")) c.scores.logistic = logistic_from_json(j.at("logistic"), c.scores.logistic);
        c.out_dir = get_or(j, "out", c.out_dir);
        c.stationary = get_or(j, "stationary", c.stationary);
        c.stay = get_or(j, "stay", c.stay);
        c.workers = get_or(j, "workers", c.workers);
        return c;
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("config JSON: ") + e.what());
    }
}

json to_json(const AggregateReport& r, const RunConfig& c) {
    json cells = json::array();
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    for (const auto& [key, s] : r.cells)
        cells.push_back({{"n", std::get<0>(key)},
                         {"L", std::get<1>(key)},
                         {"region", std::get<2>(key)},
                         {"count", s.count},
                         {"mean_fdp", s.mean_fdp},
                         {"mean_power", s.mean_power},
                         {"se_fdp", opt(s.se_fdp)},
                         {"se_power", opt(s.se_power)}});
    return {{"metadata", {{"q_target", c.q}, {"runs", c.runs}, {"config", to_json(c)}}}, {"cells", cells}};
}

} // namespace lko
