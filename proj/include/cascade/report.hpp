#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/cover.hpp"
#include "cascade/ensemble.hpp"
#include "cascade/functional.hpp"

namespace cascade {

inline constexpr const char* kToolVersion = "cascade 1.0.0";

nlohmann::json to_json(const CoverReport& r);
nlohmann::json to_json(const ScaleReport& r);
nlohmann::json to_json(const Baseline& b);
nlohmann::json to_json(const LemmaCheck& c);
nlohmann::json to_json(const CascadeConstants& c);
nlohmann::json to_json(const CascadeVerdict& v);
nlohmann::json to_json(const LocalityReport& l);
nlohmann::json to_json(const DRScan& s);
nlohmann::json to_json(const TubeScan& s);
nlohmann::json to_json(const SmallR0Search& s);

ScaleReport scale_report_from_json(const nlohmann::json& j);
Baseline baseline_from_json(const nlohmann::json& j);

// Flat comma-separated tables with a header row; numbers in %.17g.
std::string scales_csv(const std::vector<ScaleReport>& scales);
std::string locality_csv(const LocalityReport& l);
std::string dr_csv(const DRScan& s);
std::string tube_csv(const TubeScan& s);

/// Everything cmd_analyze needs. echo() writes an [analyze] section whose
/// keys match the CLI flags, so the file fed back through --config
/// reproduces the run.
struct AnalysisConfig {
    std::string field;    // velocity file, or empty
    std::string density;  // dissipation density file, or empty
    std::string energy;   // energy density paired with `density`, optional
    double R0 = 1.0;
    double delta = 0.5;
    double gamma = 0.5;
    int K1 = 20;
    int K2 = 40;
    int k_min = -3;  // scales R0 2^k, k = k_max .. k_min
    int k_max = -1;
    std::uint64_t seed = 1;
    double jitter = 0.0;
    std::size_t n_probe = 100000;
    std::string mode = "as-derived";

    std::string echo() const;
};

struct AnalysisReport {
    AnalysisConfig config;
    std::string source_kind;
    double T = 0.0;
    double C0 = 0.0;
    int m = 0;
    Baseline baseline;
    std::vector<ScaleReport> scales;
    std::vector<CoverReport> covers;
    std::vector<LemmaCheck> lemma;  // density sources only
    CascadeVerdict verdict;
    LocalityReport locality;
};

/// Loads the inputs, covers every dyadic scale (seed + scale index), and
/// assembles baseline, averages, verdict and locality table.
AnalysisReport run_analysis(const AnalysisConfig& config, kernels::Exec exec = kernels::Exec::parallel);

nlohmann::json to_json(const AnalysisReport& r);

/// report.json, scales.csv, locality.csv and config.echo in `dir`.
void write_analysis(const AnalysisReport& r, const std::string& dir);

/// Human-readable summary for the terminal.
std::string summarize(const AnalysisReport& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace cascade
