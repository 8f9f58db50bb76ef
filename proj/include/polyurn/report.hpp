#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polyurn/asymptotics.hpp"
#include "polyurn/catalog.hpp"
#include "polyurn/config.hpp"
#include "polyurn/drift.hpp"
#include "polyurn/montecarlo.hpp"
#include "polyurn/tenability.hpp"

namespace polyurn {

struct ZeroAnalysis {
    explicit ZeroAnalysis(ZeroReport z) : zero(std::move(z)) {}

    ZeroReport zero;
    std::optional<LyapunovCertificate> lyapunov;    // stable zeros
    std::optional<CltReport> clt;                   // balanced, stable/degenerate zeros
    std::optional<TwoColourCltReport> two_colour;   // balanced d = 2
    std::optional<NonBalancedReport> non_balanced;  // non-balanced d = 2
};

struct AnalysisReport {
    TenabilityReport tenability;
    std::optional<std::int64_t> balance;  // S
    std::optional<std::int64_t> diagonal; // sigma
    bool zero_search_warning = false;
    std::vector<ZeroAnalysis> zeros;
};

/// Full analytic pass: tenability, structure flags, zeros with stability,
/// Lyapunov certificates, and CLT / non-balanced parameters per stable zero.
AnalysisReport analyze(const ExperimentConfig& config);

/// Structured-text rendering of the analysis (same key = value schema family
/// as the config format).
std::string render_analysis(const AnalysisReport& report, const ExperimentConfig& config);

/// Writes clt.csv (one wide row per analysed zero, matrices row-major in
/// canonical colour order) under `dir`.
void write_analysis_csv(const AnalysisReport& report, const std::filesystem::path& dir);

/// Columns t, x_1..x_d, one row per integrator step.
void write_trajectory_csv(const FlowTrajectory& trajectory, const std::filesystem::path& file);

struct SimulationFiles {
    std::filesystem::path terminal_csv;
    std::filesystem::path checkpoint_csv;
    std::filesystem::path metadata;
};

/// Runs the ensemble and writes per-rep terminal CSV, per-checkpoint summary
/// CSV, and a metadata document echoing the configuration and seed.
SimulationFiles simulate_to_files(const ExperimentConfig& config, const std::filesystem::path& dir,
                                  int n_threads = 0);

enum class Verdict { Pass, Fail, Skip, Info };

const char* to_string(Verdict v);

struct VerifyRow {
    std::string check;
    std::string predicted;
    std::string empirical;
    std::string tolerance;
    Verdict verdict = Verdict::Info;
    std::string note;
};

struct VerifyReport {
    AnalysisReport analysis;
    std::vector<VerifyRow> rows;
    bool all_passed = true;
};

/// Runs analysis, simulates once, and compares every applicable analytic
/// prediction against the ensemble.
VerifyReport verify(const ExperimentConfig& config, int n_threads = 0);

std::string render_verify(const VerifyReport& report);

void write_verify_csv(const VerifyReport& report, const std::filesystem::path& dir);

} // namespace polyurn
