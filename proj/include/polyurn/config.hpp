#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyurn/montecarlo.hpp"
#include "polyurn/rule.hpp"
#include "polyurn/urn.hpp"

namespace polyurn {

/// Everything one experiment needs, as read from a config document:
///
///   [rule]
///   colours = 3
///   draws = 2
///   mode = with              # "with" or "without" replacement
///   [rule.entries]
///   2,0,0 = 1,0,0            # composition = addition vector
///   ...
///   [initial]
///   counts = 10,3,3
///   [analysis]
///   grid_resolution = 20
///   [simulation]
///   n_steps = 100000
///   n_reps = 1000
///   seed = 20240601
///   checkpoints = auto       # or an increasing comma list
///   [output]
///   dir = out
///
/// The entries table must cover the composition set exactly; loading fails
/// naming the first missing composition.
struct ExperimentConfig {
    int colours = 0;
    int draws = 0;
    SamplingMode mode = SamplingMode::WithReplacement;
    std::vector<std::vector<std::int64_t>> rows; // canonical composition order
    std::vector<std::int64_t> initial_counts;

    int grid_resolution = 20;

    std::int64_t n_steps = 100000;
    int n_reps = 1000;
    std::uint64_t seed = 20240601;
    std::vector<std::int64_t> checkpoints; // empty = auto (geometric)

    std::string output_dir = "out";

    ReplacementRule rule() const { return ReplacementRule(colours, draws, rows); }
    UrnState initial_state() const;
    EnsembleConfig ensemble_config() const;
};

/// Parses a config document; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::string& path);

/// Canonical serialization; load(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

} // namespace polyurn
