#include "polyurn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "polyurn/errors.hpp"

namespace polyurn {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::vector<std::int64_t> parse_int_list(const std::string& value, const std::string& field) {
    std::vector<std::int64_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("config: field '" + field + "' has a non-integer entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: field '" + field + "' is empty");
    return out;
}

std::int64_t parse_int(const std::string& value, const std::string& field) {
    try {
        std::size_t used = 0;
        const std::int64_t parsed = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config: field '" + field + "' is not an integer: '" + value + "'");
    }
}

std::string format_int_list(const std::vector<std::int64_t>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
    return os.str();
}

} // namespace

UrnState ExperimentConfig::initial_state() const {
    return make_state(initial_counts);
}

EnsembleConfig ExperimentConfig::ensemble_config() const {
    EnsembleConfig ec{rule(), initial_state(), mode, n_steps, n_reps, seed, checkpoints};
    return ec;
}

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::vector<std::pair<std::string, std::string>> entry_lines; // preserve rule.entries verbatim

    std::istringstream stream(text);
    std::string line;
    std::string current;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config: malformed section header on line " + std::to_string(line_no));
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) throw ConfigError("config: empty section name on line " + std::to_string(line_no));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' on line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (current == "rule.entries") {
            entry_lines.emplace_back(key, value);
        } else {
            if (sections[current].count(key))
                throw ConfigError("config: duplicate key '" + key + "' in section [" + current + "]");
            sections[current][key] = value;
        }
    }

    const auto take = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        auto sit = sections.find(section);
        if (sit == sections.end()) return std::nullopt;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return std::nullopt;
        std::string value = kit->second;
        sit->second.erase(kit);
        return value;
    };
    const auto require = [&](const std::string& section, const std::string& key) -> std::string {
        auto value = take(section, key);
        if (!value) throw ConfigError("config: missing required field [" + section + "] " + key);
        return *value;
    };

    ExperimentConfig config;
    config.colours = static_cast<int>(parse_int(require("rule", "colours"), "rule.colours"));
    config.draws = static_cast<int>(parse_int(require("rule", "draws"), "rule.draws"));
    if (config.colours < 2) throw ConfigError("config: rule.colours must be at least 2");
    if (config.draws < 1) throw ConfigError("config: rule.draws must be at least 1");

    const std::string mode = require("rule", "mode");
    if (mode == "with") {
        config.mode = SamplingMode::WithReplacement;
    } else if (mode == "without") {
        config.mode = SamplingMode::WithoutReplacement;
    } else {
        throw ConfigError("config: rule.mode must be 'with' or 'without', got '" + mode + "'");
    }

    std::map<DrawVector, std::vector<std::int64_t>> entries;
    for (const auto& [key, value] : entry_lines) {
        const auto comp64 = parse_int_list(key, "rule.entries composition '" + key + "'");
        DrawVector comp(comp64.begin(), comp64.end());
        if (entries.count(comp)) throw ConfigError("config: duplicate entry for composition " + key);
        entries[comp] = parse_int_list(value, "rule.entries addition for " + key);
        if (entries[comp].size() != static_cast<std::size_t>(config.colours))
            throw ConfigError("config: addition vector for composition " + key + " must have " +
                              std::to_string(config.colours) + " entries");
    }
    const auto comps = enumerate_compositions(config.colours, config.draws);
    for (const auto& comp : comps) {
        auto it = entries.find(comp);
        if (it == entries.end()) {
            std::vector<std::int64_t> as64(comp.begin(), comp.end());
            throw ConfigError("config: missing entry for composition " + format_int_list(as64));
        }
        config.rows.push_back(it->second);
        entries.erase(it);
    }
    if (!entries.empty()) {
        std::vector<std::int64_t> as64(entries.begin()->first.begin(), entries.begin()->first.end());
        throw ConfigError("config: entry " + format_int_list(as64) + " is not a composition of " +
                          std::to_string(config.draws) + " into " + std::to_string(config.colours) + " parts");
    }

    config.initial_counts = parse_int_list(require("initial", "counts"), "initial.counts");
    if (config.initial_counts.size() != static_cast<std::size_t>(config.colours))
        throw ConfigError("config: initial.counts must have one entry per colour");

    if (auto v = take("analysis", "grid_resolution")) {
        config.grid_resolution = static_cast<int>(parse_int(*v, "analysis.grid_resolution"));
        if (config.grid_resolution < 2) throw ConfigError("config: analysis.grid_resolution must be at least 2");
    }
    if (auto v = take("simulation", "n_steps")) {
        config.n_steps = parse_int(*v, "simulation.n_steps");
        if (config.n_steps < 1) throw ConfigError("config: simulation.n_steps must be positive");
    }
    if (auto v = take("simulation", "n_reps")) {
        config.n_reps = static_cast<int>(parse_int(*v, "simulation.n_reps"));
        if (config.n_reps < 1) throw ConfigError("config: simulation.n_reps must be at least 1");
    }
    if (auto v = take("simulation", "seed")) {
        config.seed = static_cast<std::uint64_t>(parse_int(*v, "simulation.seed"));
    }
    if (auto v = take("simulation", "checkpoints"); v && *v != "auto") {
        config.checkpoints = parse_int_list(*v, "simulation.checkpoints");
        if (!std::is_sorted(config.checkpoints.begin(), config.checkpoints.end()))
            throw ConfigError("config: simulation.checkpoints must be increasing");
    }
    if (auto v = take("output", "dir")) config.output_dir = *v;

    for (const auto& [section, keys] : sections) {
        if (keys.empty()) continue;
        if (section != "rule" && section != "initial" && section != "analysis" && section != "simulation" &&
            section != "output") {
            throw ConfigError("config: unknown section [" + section + "]");
        }
        throw ConfigError("config: unknown field [" + section + "] " + keys.begin()->first);
    }

    try {
        config.rule();
        config.initial_state();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream os;
    os << "[rule]\n";
    os << "colours = " << config.colours << "\n";
    os << "draws = " << config.draws << "\n";
    os << "mode = " << (config.mode == SamplingMode::WithReplacement ? "with" : "without") << "\n";
    os << "\n[rule.entries]\n";
    const auto comps = enumerate_compositions(config.colours, config.draws);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::vector<std::int64_t> as64(comps[i].begin(), comps[i].end());
        os << format_int_list(as64) << " = " << format_int_list(config.rows[i]) << "\n";
    }
    os << "\n[initial]\n";
    os << "counts = " << format_int_list(config.initial_counts) << "\n";
    os << "\n[analysis]\n";
    os << "grid_resolution = " << config.grid_resolution << "\n";
    os << "\n[simulation]\n";
    os << "n_steps = " << config.n_steps << "\n";
    os << "n_reps = " << config.n_reps << "\n";
    os << "seed = " << config.seed << "\n";
    os << "checkpoints = " << (config.checkpoints.empty() ? "auto" : format_int_list(config.checkpoints)) << "\n";
    os << "\n[output]\n";
    os << "dir = " << config.output_dir << "\n";
    return os.str();
}

} // namespace polyurn
