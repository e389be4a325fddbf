#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fedrun/data/csv.hpp"
#include "fedrun/data/synthetic.hpp"
#include "fedrun/gov/audit.hpp"
#include "fedrun/run/experiment.hpp"

namespace fs = std::filesystem;
using namespace fedrun;

static int cmd_generate_data(const std::string& preset, double scale, uint64_t seed,
                             const fs::path& out_dir) {
    data::CohortSpec spec = data::preset(preset, scale);
    data::CohortDataset ds = data::generate_cohort(spec, seed);
    fs::create_directories(out_dir);

    fs::path csv = out_dir / (preset + ".csv");
    data::write_cohort_csv(csv, ds);

    nlohmann::ordered_json prov;
    prov["preset"] = preset;
    prov["scale"] = scale;
    prov["seed"] = seed;
    prov["site_id"] = spec.site_id;
    prov["dim"] = spec.dim;
    prov["splits"] = {
        {"train", {{"n", spec.train.n}, {"prevalence", spec.train.prevalence}}},
        {"val", {{"n", spec.val.n}, {"prevalence", spec.val.prevalence}}},
        {"test", {{"n", spec.test.n}, {"prevalence", spec.test.prevalence}}},
    };
    prov["signal_dims"] = spec.signal_dims;
    prov["effect_size"] = spec.effect_size;
    std::ofstream side(out_dir / (preset + ".provenance.json"));
    side << prov.dump(2) << '\n';

    std::cout << "wrote " << csv.string() << " (" << ds.n() << " rows)\n";
    return 0;
}

static int cmd_run(const fs::path& config_path, const std::string& transport_override,
                   const fs::path& policy_file, bool verbose) {
    run::ExperimentConfig cfg = run::load_experiment_config(config_path);
    if (!transport_override.empty()) cfg.transport = transport_override;
    if (!policy_file.empty()) cfg.policy_file = policy_file;

    run::ExperimentResult result = run::run_experiment(cfg);

    if (verbose) {
        for (const auto& [method, report] : result.federated_runs) {
            std::cout << method << ": " << report.rounds_executed << " rounds, best round "
                      << report.best_round << " (" << report.stop_reason << ")\n";
            for (const auto& rr : report.history)
                std::cout << "  round " << rr.round << " macro val AUC "
                          << metrics::format4(rr.macro_val_auc) << "\n";
        }
    }
    std::cout << run::render_report_table(result);
    std::cout << "run directory: " << cfg.output_dir.string() << "\n";
    return 0;
}

static int cmd_verify_audit(const fs::path& log_path, const fs::path& key_path) {
    crypto::PublicKey pub = gov::load_public_key_file(key_path);
    gov::VerifyResult r = gov::verify_audit_file(log_path, pub);
    if (r.ok) {
        std::cout << "audit chain OK\n";
        return 0;
    }
    std::cout << "audit chain BROKEN at seq " << r.first_bad_seq << " ("
              << gov::break_reason_name(r.reason) << ")\n";
    return 1;
}

static int cmd_report(const fs::path& results_path) {
    std::cout << run::render_report_from_file(results_path);
    return 0;
}

int main(int argc, char** argv) {
    CLI::App app{"federated training runtime with policy-gated exchange and signed audit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate-data", "write a synthetic site cohort CSV");
    std::string preset;
    double scale = 0.1;
    uint64_t seed = 42;
    std::string gen_out = "data";
    gen->add_option("--preset", preset, "cohort preset (aumc_like | nhsbt_like)")->required();
    gen->add_option("--scale", scale, "split size multiplier (1.0 = full size)");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", gen_out, "output directory");

    auto* runcmd = app.add_subcommand("run", "run the configured strategies");
    std::string config_file;
    std::string transport;
    std::string policy_file;
    bool verbose = std::getenv("FEDRUN_VERBOSE") != nullptr;
    runcmd->add_option("--config", config_file, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    runcmd->add_option("--transport", transport, "memory | tcp")
        ->check(CLI::IsMember({"memory", "tcp"}));
    runcmd->add_option("--policy", policy_file, "policy rules JSON (replaces the generated set)")
        ->check(CLI::ExistingFile);
    runcmd->add_flag("--verbose", verbose, "print per-round history");

    auto* verify = app.add_subcommand("verify-audit", "verify an audit log chain");
    std::string log_file, key_file;
    verify->add_option("--log", log_file, "audit log file")->required()->check(CLI::ExistingFile);
    verify->add_option("--key", key_file, "hex public key file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* report = app.add_subcommand("report", "render the results table");
    std::string results_file;
    report->add_option("--results", results_file, "results.json from a run")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate_data(preset, scale, seed, gen_out);
        if (runcmd->parsed()) return cmd_run(config_file, transport, policy_file, verbose);
        if (verify->parsed()) return cmd_verify_audit(log_file, key_file);
        if (report->parsed()) return cmd_report(results_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
