#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fedrun/fl/coordinator.hpp"
#include "fedrun/fl/study.hpp"
#include "fedrun/metrics/metrics.hpp"

namespace fedrun::run {

constexpr size_t kBootstrapResamples = 1000;

struct SiteSource {
    std::string preset;  // preset name (with scale), or
    std::string csv;     // path to a cohort CSV
    double scale = 0.1;
};

struct ExperimentConfig {
    fl::StudyConfig study;  // strategy.kind is replaced per requested strategy
    std::vector<SiteSource> sites;
    std::vector<agg::StrategyKind> strategies;
    std::filesystem::path output_dir = "out";
    uint64_t master_seed = 42;
    std::string transport = "memory";  // or "tcp"
    std::string listen_addr = "127.0.0.1:0";
    // replaces the generated deny-by-default policy when set
    std::filesystem::path policy_file;
};

// Strict JSON config: unknown keys are errors. Environment overrides:
// FEDRUN_OUTPUT_DIR replaces output_dir.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct MethodSiteResult {
    std::string method;
    std::string site;
    metrics::SiteMetrics m;
};

struct ExperimentResult {
    std::vector<std::string> sites;  // roster order
    std::vector<std::string> methods;
    std::vector<MethodSiteResult> rows;
    std::map<std::string, metrics::MacroMetrics> macro_by_method;
    std::map<std::string, fl::FinalReport> federated_runs;
};

// Runs every requested strategy over the configured sites and writes the run
// directory: config.json, policy.json, results.json, report.txt, audit.log,
// audit_pub.key.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string render_report_table(const ExperimentResult& result);

// report rendering from a results file (the `report` subcommand)
std::string render_report_from_file(const std::filesystem::path& results_json);

}  // namespace fedrun::run
