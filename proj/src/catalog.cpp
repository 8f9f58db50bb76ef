#include "polyurn/catalog.hpp"

#include "polyurn/errors.hpp"

namespace polyurn {

namespace {

struct Builtin {
    const char* name;
    const char* description;
    int colours;
    int draws;
    std::vector<std::vector<std::int64_t>> rows; // canonical composition order
    std::vector<std::int64_t> initial;
    std::int64_t n_steps;
    std::vector<std::int64_t> checkpoints; // empty = auto
};

// d = 3, m = 2 compositions in canonical order:
// (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).
const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> entries = {
        {"4.1.1", "two colours, m=2; unique zero 1/2, sqrt(n)-Gaussian with Gamma = 1/36",
         2, 2, {{1, 2}, {2, 1}, {1, 2}}, {1, 1}, 100000, {}},
        {"4.1.2", "two colours, m=2; zeros {1/3 stable, 1 unstable}, sqrt(n/log n) regime with Gamma = 1/18",
         2, 2, {{4, 0}, {1, 3}, {1, 3}}, {1, 3}, 100000, {}},
        {"4.1.3", "two colours, m=2; unique zero 1-sqrt(2)/2, almost-sure rate n^(sqrt(2)/4)",
         2, 2, {{7, 1}, {3, 5}, {1, 7}}, {1, 1}, 128000,
         {1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000}},
        {"4.1.4", "two colours, m=2; double zero at 1, degenerate (no rate claim)",
         2, 2, {{6, 0}, {3, 3}, {1, 5}}, {1, 1}, 100000, {}},
        {"4.1.5", "two colours, m=3; zeros {1/10, 1/2, 9/10}, limit depends on the start",
         2, 3, {{82, 9}, {91, 0}, {0, 91}, {9, 82}}, {4, 6}, 128000,
         {1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000}},
        {"4.2.1", "three colours, m=2; stable centre (1/3,1/3,1/3), Sigma = Gamma",
         3, 2, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 0}, {1, 0, 0}, {0, 0, 1}}, {1, 1, 1}, 100000, {}},
        {"4.2.2", "three colours, m=2; stable zero (1/5,2/5,2/5), eigenvalues {-2,-18/5}",
         3, 2, {{2, 0, 0}, {0, 0, 2}, {0, 2, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 0}}, {10, 3, 3}, 100000, {}},
        {"4.2.3", "three colours, m=2; stable zero (3/5,1/5,1/5), almost-sure rate n^(1/3)",
         3, 2, {{3, 0, 0}, {1, 1, 1}, {1, 1, 1}, {0, 3, 0}, {3, 0, 0}, {0, 0, 3}}, {3, 10, 3}, 128000,
         {1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000}},
        {"4.2.4", "three colours, m=2; unique zero (0,0,1) with zero eigenvalues, degenerate",
         3, 2, {{0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 0, 2}, {0, 1, 1}, {0, 0, 2}}, {1, 1, 1}, 100000, {}},
        {"4.2.5", "rock-paper-scissors, m=2; four zeros, none stable, trajectories cycle",
         3, 2, {{1, 0, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}}, {5, 3, 2}, 100000, {}},
        {"5.1", "non-balanced two colours, m=2; zero 1/2, omega = 5/2, CLT variance 1/10",
         2, 2, {{2, 1}, {1, 1}, {1, 2}}, {1, 1}, 100000, {}},
        {"5.2", "non-balanced cross-reinforcing, (a,b)=(1,4), m=2; zero 1/3, omega = 4, lambda = 2",
         2, 2, {{0, 8}, {1, 4}, {2, 0}}, {1, 1}, 100000, {}},
        {"5.3", "non-balanced self-reinforcing, (a,b)=(1,2), m=2; sigma^2 = 0, CLT not applicable",
         2, 2, {{2, 0}, {1, 2}, {0, 4}}, {1, 1}, 100000, {}},
    };
    return entries;
}

} // namespace

std::vector<CatalogueEntry> catalogue_entries() {
    std::vector<CatalogueEntry> out;
    out.reserve(builtins().size());
    for (const auto& b : builtins()) out.push_back({b.name, b.description});
    return out;
}

bool catalogue_has(const std::string& name) {
    for (const auto& b : builtins())
        if (name == b.name) return true;
    return false;
}

ExperimentConfig catalogue_config(const std::string& name) {
    for (std::size_t i = 0; i < builtins().size(); ++i) {
        const Builtin& b = builtins()[i];
        if (name != b.name) continue;
        ExperimentConfig config;
        config.colours = b.colours;
        config.draws = b.draws;
        config.mode = SamplingMode::WithReplacement;
        config.rows = b.rows;
        config.initial_counts = b.initial;
        config.n_steps = b.n_steps;
        config.n_reps = 1000;
        config.seed = 414243 + static_cast<std::uint64_t>(i);
        config.checkpoints = b.checkpoints;
        config.output_dir = "out";
        return config;
    }
    std::string known;
    for (const auto& b : builtins()) known += std::string(known.empty() ? "" : ", ") + b.name;
    throw ConfigError("unknown catalogue example '" + name + "'; valid names: " + known);
}

} // namespace polyurn
