#include "fedrun/run/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "fedrun/data/csv.hpp"
#include "fedrun/data/synthetic.hpp"
#include "fedrun/fl/site.hpp"
#include "fedrun/gov/gate.hpp"
#include "fedrun/nn/loss.hpp"

namespace fedrun::run {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.contains(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    reject_unknown(doc,
                   {"study_id", "rounds", "patience", "window_seconds", "model", "train",
                    "strategy", "strategies", "sites", "output_dir", "master_seed", "transport",
                    "listen_addr"},
                   "config");

    ExperimentConfig cfg;
    cfg.study.study_id = doc.at("study_id").get<std::string>();
    if (doc.contains("rounds")) cfg.study.rounds = doc["rounds"].get<uint32_t>();
    if (doc.contains("patience")) cfg.study.patience = doc["patience"].get<uint32_t>();
    if (doc.contains("window_seconds"))
        cfg.study.window_seconds = doc["window_seconds"].get<double>();

    if (doc.contains("model")) {
        const auto& m = doc["model"];
        reject_unknown(m, {"layer_dims", "dropout"}, "model");
        if (m.contains("layer_dims"))
            cfg.study.model.layer_dims = m["layer_dims"].get<std::vector<size_t>>();
        if (m.contains("dropout")) cfg.study.model.dropout = m["dropout"].get<double>();
    }
    if (doc.contains("train")) {
        const auto& t = doc["train"];
        reject_unknown(t, {"learning_rate", "batch_size", "local_epochs"}, "train");
        if (t.contains("learning_rate"))
            cfg.study.train.learning_rate = t["learning_rate"].get<double>();
        if (t.contains("batch_size")) cfg.study.train.batch_size = t["batch_size"].get<size_t>();
        if (t.contains("local_epochs"))
            cfg.study.train.local_epochs = t["local_epochs"].get<size_t>();
    }
    if (doc.contains("strategy")) {
        const auto& s = doc["strategy"];
        reject_unknown(s, {"mu_p", "likelihood_scale", "regulariser"}, "strategy");
        if (s.contains("mu_p")) cfg.study.strategy.mu_p = s["mu_p"].get<double>();
        if (s.contains("likelihood_scale")) {
            std::string ls = s["likelihood_scale"].get<std::string>();
            if (ls == "sum")
                cfg.study.strategy.likelihood_scale = agg::LikelihoodScale::sum;
            else if (ls == "mean")
                cfg.study.strategy.likelihood_scale = agg::LikelihoodScale::mean;
            else
                throw ConfigError("likelihood_scale must be 'sum' or 'mean'");
        }
        if (s.contains("regulariser")) {
            const auto& r = s["regulariser"];
            reject_unknown(r, {"alpha", "epsilon", "icnn_lr", "icnn_steps", "icnn_hidden"},
                           "regulariser");
            auto& rc = cfg.study.strategy.regulariser;
            if (r.contains("alpha")) rc.alpha = r["alpha"].get<double>();
            if (r.contains("epsilon")) rc.epsilon = r["epsilon"].get<double>();
            if (r.contains("icnn_lr")) rc.icnn_lr = r["icnn_lr"].get<double>();
            if (r.contains("icnn_steps")) rc.icnn_steps = r["icnn_steps"].get<size_t>();
            if (r.contains("icnn_hidden"))
                rc.icnn_hidden = r["icnn_hidden"].get<std::vector<size_t>>();
        }
    }

    for (const auto& st : doc.at("strategies"))
        cfg.strategies.push_back(agg::strategy_from_name(st.get<std::string>()));
    if (cfg.strategies.empty()) throw ConfigError("strategies must name at least one method");

    for (const auto& s : doc.at("sites")) {
        reject_unknown(s, {"preset", "scale", "csv"}, "site");
        SiteSource src;
        if (s.contains("preset")) src.preset = s["preset"].get<std::string>();
        if (s.contains("scale")) src.scale = s["scale"].get<double>();
        if (s.contains("csv")) src.csv = s["csv"].get<std::string>();
        if (src.preset.empty() == src.csv.empty())
            throw ConfigError("each site needs exactly one of 'preset' or 'csv'");
        if (!src.csv.empty() && !std::filesystem::exists(src.csv))
            throw ConfigError("site csv does not exist: " + src.csv);
        cfg.sites.push_back(std::move(src));
    }
    if (cfg.sites.empty()) throw ConfigError("sites must not be empty");

    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("master_seed")) cfg.master_seed = doc["master_seed"].get<uint64_t>();
    if (doc.contains("transport")) {
        cfg.transport = doc["transport"].get<std::string>();
        if (cfg.transport != "memory" && cfg.transport != "tcp")
            throw ConfigError("transport must be 'memory' or 'tcp'");
    }
    if (doc.contains("listen_addr")) cfg.listen_addr = doc["listen_addr"].get<std::string>();

    if (const char* env = std::getenv("FEDRUN_OUTPUT_DIR")) cfg.output_dir = env;
    return cfg;
}

namespace {

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["study_id"] = cfg.study.study_id;
    doc["rounds"] = cfg.study.rounds;
    doc["patience"] = cfg.study.patience;
    doc["window_seconds"] = cfg.study.window_seconds;
    doc["model"] = {{"layer_dims", cfg.study.model.layer_dims},
                    {"dropout", cfg.study.model.dropout}};
    doc["train"] = {{"learning_rate", cfg.study.train.learning_rate},
                    {"batch_size", cfg.study.train.batch_size},
                    {"local_epochs", cfg.study.train.local_epochs}};
    doc["strategy"] = {
        {"mu_p", cfg.study.strategy.mu_p},
        {"likelihood_scale",
         cfg.study.strategy.likelihood_scale == agg::LikelihoodScale::sum ? "sum" : "mean"},
        {"regulariser",
         {{"alpha", cfg.study.strategy.regulariser.alpha},
          {"epsilon", cfg.study.strategy.regulariser.epsilon},
          {"icnn_lr", cfg.study.strategy.regulariser.icnn_lr},
          {"icnn_steps", cfg.study.strategy.regulariser.icnn_steps},
          {"icnn_hidden", cfg.study.strategy.regulariser.icnn_hidden}}}};
    ordered_json strategies = ordered_json::array();
    for (auto k : cfg.strategies) strategies.push_back(agg::strategy_name(k));
    doc["strategies"] = strategies;
    ordered_json sites = ordered_json::array();
    for (const auto& s : cfg.sites) {
        ordered_json o;
        if (!s.preset.empty()) {
            o["preset"] = s.preset;
            o["scale"] = s.scale;
        } else {
            o["csv"] = s.csv;
        }
        sites.push_back(std::move(o));
    }
    doc["sites"] = sites;
    doc["output_dir"] = cfg.output_dir.string();
    doc["master_seed"] = cfg.master_seed;
    doc["transport"] = cfg.transport;
    return doc;
}

std::vector<gov::PolicyRule> default_policy(const std::string& study_id,
                                            const std::vector<std::string>& roster,
                                            uint32_t rounds) {
    std::vector<gov::PolicyRule> rules;
    for (const auto& site : roster) {
        auto add = [&](gov::Action a, const char* tag, std::optional<gov::RoundRange> rr) {
            gov::PolicyRule r;
            r.rule_id = study_id + ":" + site + ":" + tag;
            r.effect = gov::Effect::permit;
            r.subject = site;
            r.action = a;
            r.resource = study_id;
            r.rounds = rr;
            rules.push_back(std::move(r));
        };
        add(gov::Action::join_study, "join", std::nullopt);
        // pull stays open so Stop can always be delivered
        add(gov::Action::pull_model, "pull", std::nullopt);
        add(gov::Action::push_update, "push", gov::RoundRange{1, rounds});
        add(gov::Action::read_metrics, "metrics", gov::RoundRange{1, rounds});
    }
    return rules;
}

struct LocalOutcome {
    nn::ParamVector best_params;
    uint32_t best_round = 0;
    double best_val_auc = -1.0;
    uint32_t rounds_executed = 0;
};

// Per-site baseline: the same round structure without any communication.
LocalOutcome local_baseline(const data::CohortDataset& ds, const fl::StudyConfig& study) {
    nn::MlpClassifier net = nn::build_mlp(study.model.layer_dims,
                                          static_cast<float>(study.model.dropout),
                                          fl::init_seed(study.train));
    Rng rng(fl::site_seed(study.train, ds.site_id));
    agg::StrategyConfig local_cfg;
    local_cfg.kind = agg::StrategyKind::local;

    auto val_idx = ds.indices_of(data::Split::val);
    std::vector<uint8_t> val_labels(val_idx.size());
    for (size_t i = 0; i < val_idx.size(); ++i) val_labels[i] = ds.labels[val_idx[i]];

    LocalOutcome out;
    out.best_params = net.to_params();
    uint32_t no_improve = 0;
    for (uint32_t round = 1; round <= study.rounds; ++round) {
        fl::train_local_epochs(net, ds, study.train, local_cfg, nullptr, nullptr, rng);
        out.rounds_executed = round;
        std::vector<double> probs = fl::predict(net, ds, val_idx);
        double auc = metrics::roc_auc(probs, val_labels);
        if (auc > out.best_val_auc + study.improvement_threshold) {
            out.best_val_auc = auc;
            out.best_round = round;
            out.best_params = net.to_params();
            no_improve = 0;
        } else if (++no_improve >= study.patience) {
            break;
        }
    }
    return out;
}

metrics::SiteMetrics evaluate_model(const nn::ParamVector& params, const fl::StudyConfig& study,
                                    const data::CohortDataset& ds, uint64_t master_seed,
                                    const std::string& method) {
    nn::MlpClassifier net = nn::build_mlp(study.model.layer_dims,
                                          static_cast<float>(study.model.dropout), 0);
    net.from_params(params);

    auto gather = [&](data::Split split) {
        auto idx = ds.indices_of(split);
        std::vector<double> scores = fl::predict(net, ds, idx);
        std::vector<uint8_t> labels(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) labels[i] = ds.labels[idx[i]];
        return std::pair{std::move(scores), std::move(labels)};
    };

    auto [val_scores, val_labels] = gather(data::Split::val);
    auto [test_scores, test_labels] = gather(data::Split::test);

    metrics::SiteMetrics sm;
    sm.threshold = metrics::select_threshold(val_scores, val_labels);
    sm.roc_auc = metrics::roc_auc(test_scores, test_labels);
    sm.balanced_accuracy = metrics::balanced_accuracy(test_scores, test_labels, sm.threshold);

    auto auc_fn = [](std::span<const double> s, std::span<const uint8_t> y) {
        return metrics::roc_auc(s, y);
    };
    double thr = sm.threshold;
    auto ba_fn = [thr](std::span<const double> s, std::span<const uint8_t> y) {
        return metrics::balanced_accuracy(s, y, thr);
    };
    std::string tag = "bootstrap:" + method + ":" + ds.site_id;
    sm.roc_auc_ci = metrics::bootstrap_ci(test_scores, test_labels, auc_fn, kBootstrapResamples,
                                          mix_seed(master_seed, tag + ":auc"));
    sm.balanced_accuracy_ci = metrics::bootstrap_ci(
        test_scores, test_labels, ba_fn, kBootstrapResamples, mix_seed(master_seed, tag + ":ba"));
    return sm;
}

fl::FinalReport run_federated_memory(const fl::StudyConfig& study,
                                     const std::vector<const data::CohortDataset*>& datasets,
                                     const fl::GovernanceHandle& governance) {
    fl::MemoryHub hub;
    std::optional<icnn::Icnn> psi;
    fl::MapRegulariserHooks hooks;
    const fl::MapRegulariserHooks* hooks_ptr = nullptr;
    if (study.strategy.kind == agg::StrategyKind::fedmap) {
        size_t dim = nn::build_mlp(study.model.layer_dims, 0.0f, fl::init_seed(study.train))
                         .layout()
                         ->total_size();
        psi = icnn::Icnn::build(dim, study.strategy.regulariser.icnn_hidden,
                                fl::icnn_seed(study.train));
        auto cfg = study.strategy.regulariser;
        hooks.value = [&psi, cfg](const nn::ParamVector& t, const nn::ParamVector& g) {
            return icnn::eval_regulariser(t, g, *psi, cfg);
        };
        hooks.grad = [&psi, cfg](const nn::ParamVector& t, const nn::ParamVector& g) {
            return icnn::grad_regulariser_theta(t, g, *psi, cfg);
        };
        hooks_ptr = &hooks;
    }

    std::vector<std::unique_ptr<fl::SiteNode>> nodes;
    for (size_t i = 0; i < study.roster.size(); ++i) {
        fl::Session& session = hub.register_site(study.roster[i]);
        fl::SiteNodeConfig scfg{study.study_id, study.roster[i], study.strategy, study.train,
                                study.model};
        nodes.push_back(std::make_unique<fl::SiteNode>(scfg, datasets[i], &session,
                                                       governance.policy, governance.audit,
                                                       governance.clock, hooks_ptr));
        fl::SiteNode* node = nodes.back().get();
        hub.set_handler(study.roster[i],
                        [node](std::span<const uint8_t> frame) { node->handle_frame(frame); });
        node->start();
    }
    return fl::coordinator_run(study, hub, governance, psi ? &*psi : nullptr);
}

fl::FinalReport run_federated_tcp(const fl::StudyConfig& study,
                                  const std::vector<const data::CohortDataset*>& datasets,
                                  const fl::GovernanceHandle& governance,
                                  const std::string& listen_addr) {
    fl::StudyConfig tcp_study = study;
    if (tcp_study.window_seconds <= 0) tcp_study.window_seconds = 300;

    fl::TcpListener listener(listen_addr);
    std::string addr = listener.bound_address();

    std::vector<std::thread> threads;
    std::vector<std::unique_ptr<fl::Session>> site_sessions(study.roster.size());
    std::vector<std::unique_ptr<fl::SiteNode>> nodes(study.roster.size());
    for (size_t i = 0; i < study.roster.size(); ++i) {
        site_sessions[i] = fl::tcp_connect(addr);
        fl::SiteNodeConfig scfg{study.study_id, study.roster[i], study.strategy, study.train,
                                study.model};
        // no regulariser hooks over tcp: psi stays with the coordinator and
        // sites fall back to the quadratic terms
        nodes[i] = std::make_unique<fl::SiteNode>(scfg, datasets[i], site_sessions[i].get(),
                                                  governance.policy, governance.audit,
                                                  governance.clock, nullptr);
        fl::SiteNode* node = nodes[i].get();
        fl::Session* sess = site_sessions[i].get();
        threads.emplace_back([node, sess] { fl::site_run(*node, *sess); });
    }
    fl::FinalReport report = fl::coordinator_run(tcp_study, listener, governance);
    for (auto& t : threads) t.join();
    return report;
}

void append_results_json(const ExperimentConfig& cfg, const ExperimentResult& result,
                         const std::filesystem::path& path) {
    ordered_json doc;
    doc["study_id"] = cfg.study.study_id;
    doc["master_seed"] = cfg.master_seed;
    doc["transport"] = cfg.transport;
    doc["ci_method"] =
        "percentile bootstrap, B=" + std::to_string(kBootstrapResamples) + ", seeded";
    doc["likelihood_scale"] =
        cfg.study.strategy.likelihood_scale == agg::LikelihoodScale::sum ? "sum" : "mean";
    doc["sites"] = result.sites;
    doc["methods"] = result.methods;

    ordered_json rows = ordered_json::array();
    for (const auto& r : result.rows) {
        ordered_json o;
        o["method"] = r.method;
        o["site"] = r.site;
        o["roc_auc"] = r.m.roc_auc;
        o["roc_auc_ci"] = {r.m.roc_auc_ci.lo, r.m.roc_auc_ci.hi};
        o["balanced_accuracy"] = r.m.balanced_accuracy;
        o["balanced_accuracy_ci"] = {r.m.balanced_accuracy_ci.lo, r.m.balanced_accuracy_ci.hi};
        o["threshold"] = r.m.threshold;
        rows.push_back(std::move(o));
    }
    doc["results"] = rows;

    ordered_json macros = ordered_json::array();
    for (const auto& method : result.methods) {
        const auto& mm = result.macro_by_method.at(method);
        macros.push_back(ordered_json{{"method", method},
                                      {"roc_auc", mm.macro_roc_auc},
                                      {"balanced_accuracy", mm.macro_balanced_accuracy}});
    }
    doc["macro"] = macros;

    ordered_json runs = ordered_json::array();
    for (const auto& method : result.methods) {
        auto it = result.federated_runs.find(method);
        if (it == result.federated_runs.end()) continue;
        const auto& rep = it->second;
        ordered_json o;
        o["method"] = method;
        o["rounds_executed"] = rep.rounds_executed;
        o["best_round"] = rep.best_round;
        o["stop_reason"] = rep.stop_reason;
        ordered_json hist = ordered_json::array();
        for (const auto& rr : rep.history) {
            ordered_json h;
            h["round"] = rr.round;
            h["macro_val_auc"] = rr.macro_val_auc;
            if (!rr.aggregation_weights.empty()) h["weights"] = rr.aggregation_weights;
            hist.push_back(std::move(h));
        }
        o["history"] = hist;
        runs.push_back(std::move(o));
    }
    doc["runs"] = runs;

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.strategies.empty()) throw ConfigError("no strategies requested");

    // datasets are shared across strategies; one stream per site
    std::vector<data::CohortDataset> datasets;
    for (const auto& src : cfg.sites) {
        if (!src.csv.empty()) {
            datasets.push_back(data::load_embeddings_csv(src.csv));
        } else {
            data::CohortSpec spec = data::preset(src.preset, src.scale);
            datasets.push_back(
                data::generate_cohort(spec, mix_seed(cfg.master_seed, "data:" + src.preset)));
        }
    }
    std::vector<std::string> roster;
    for (const auto& ds : datasets) {
        for (const auto& seen : roster)
            if (seen == ds.site_id) throw ConfigError("duplicate site id " + ds.site_id);
        roster.push_back(ds.site_id);
    }
    if (cfg.study.model.layer_dims.front() != datasets.front().dim)
        throw ConfigError("model input width does not match embedding width");

    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream snap(cfg.output_dir / "config.json");
        snap << config_to_json(cfg).dump(2) << '\n';
    }

    bool memory = cfg.transport == "memory";
    crypto::SigningKey key = crypto::SigningKey::from_seed64(mix_seed(cfg.master_seed, "audit-key"));
    gov::AuditLog audit(key, cfg.output_dir / "audit.log");
    gov::write_public_key_file(cfg.output_dir / "audit_pub.key", key.pub);
    LogicalClock logical;
    SystemClock system;
    Clock& clock = memory ? static_cast<Clock&>(logical) : system;

    ExperimentResult result;
    result.sites = roster;

    std::vector<gov::PolicyRule> all_rules;
    if (!cfg.policy_file.empty()) {
        all_rules = gov::load_policy_file(cfg.policy_file);
    } else {
        for (auto kind : cfg.strategies) {
            if (kind == agg::StrategyKind::local) continue;
            std::string scoped = cfg.study.study_id + "/" + agg::strategy_name(kind);
            auto rules = default_policy(scoped, roster, cfg.study.rounds);
            all_rules.insert(all_rules.end(), rules.begin(), rules.end());
        }
    }
    gov::validate_policy(all_rules);
    gov::write_policy_file(cfg.output_dir / "policy.json", all_rules);

    std::vector<const data::CohortDataset*> ds_ptrs;
    for (const auto& d : datasets) ds_ptrs.push_back(&d);

    for (auto kind : cfg.strategies) {
        std::string method = agg::strategy_name(kind);
        result.methods.push_back(method);

        fl::StudyConfig study = cfg.study;
        study.roster = roster;
        study.strategy.kind = kind;
        study.train.seed = mix_seed(cfg.master_seed, "train");

        std::map<std::string, nn::ParamVector> models;
        if (kind == agg::StrategyKind::local) {
            for (const auto& ds : datasets) {
                LocalOutcome out = local_baseline(ds, study);
                models[ds.site_id] = std::move(out.best_params);
            }
            gov::AuditEvent done;
            done.kind = "completion";
            done.subject = "coordinator";
            done.action = "local baselines trained";
            done.resource = cfg.study.study_id + "/local";
            done.timestamp_ms = clock.now_ms();
            audit.append(done);
        } else {
            study.study_id = cfg.study.study_id + "/" + method;
            fl::GovernanceHandle governance{all_rules, &audit, &clock};
            fl::FinalReport report =
                memory ? run_federated_memory(study, ds_ptrs, governance)
                       : run_federated_tcp(study, ds_ptrs, governance, cfg.listen_addr);
            if (report.stop_reason.starts_with("aborted"))
                throw TrainingError("study " + study.study_id + " failed: " + report.stop_reason);
            models = report.final_site_models;
            result.federated_runs[method] = std::move(report);
        }

        std::vector<metrics::SiteMetrics> site_metrics;
        for (const auto& ds : datasets) {
            metrics::SiteMetrics sm =
                evaluate_model(models.at(ds.site_id), study, ds, cfg.master_seed, method);
            site_metrics.push_back(sm);
            result.rows.push_back({method, ds.site_id, sm});
        }
        if (site_metrics.size() == 2) {
            result.macro_by_method[method] = metrics::macro(site_metrics[0], site_metrics[1]);
        } else {
            metrics::MacroMetrics mm{};
            for (const auto& sm : site_metrics) {
                mm.macro_roc_auc += sm.roc_auc / site_metrics.size();
                mm.macro_balanced_accuracy += sm.balanced_accuracy / site_metrics.size();
            }
            result.macro_by_method[method] = mm;
        }
    }

    append_results_json(cfg, result, cfg.output_dir / "results.json");
    {
        std::ofstream rep(cfg.output_dir / "report.txt");
        rep << render_report_table(result);
    }
    return result;
}

namespace {

struct TableRow {
    std::string method, site;
    double auc = 0, auc_lo = 0, auc_hi = 0, ba = 0, ba_lo = 0, ba_hi = 0;
    bool macro = false;
};

std::string render_rows(const std::vector<TableRow>& rows, const std::string& ci_note) {
    // best per (site, metric) across methods gets a trailing '*'
    std::map<std::string, double> best_auc, best_ba;
    for (const auto& r : rows) {
        auto& ba = best_auc[r.site];
        ba = std::max(ba, r.auc);
        auto& bb = best_ba[r.site];
        bb = std::max(bb, r.ba);
    }
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-12s %-9s %-18s %-9s %-18s\n", "Method", "Site",
                  "ROC-AUC", "95% CI", "Bal.Acc", "95% CI");
    out += line;
    out += std::string(80, '-') + "\n";
    for (const auto& r : rows) {
        std::string auc = metrics::format4(r.auc) + (r.auc == best_auc[r.site] ? "*" : "");
        std::string ba = metrics::format4(r.ba) + (r.ba == best_ba[r.site] ? "*" : "");
        std::string auc_ci = r.macro ? "--"
                                     : "[" + metrics::format4(r.auc_lo) + ", " +
                                           metrics::format4(r.auc_hi) + "]";
        std::string ba_ci = r.macro ? "--"
                                    : "[" + metrics::format4(r.ba_lo) + ", " +
                                          metrics::format4(r.ba_hi) + "]";
        std::snprintf(line, sizeof line, "%-10s %-12s %-9s %-18s %-9s %-18s\n", r.method.c_str(),
                      r.site.c_str(), auc.c_str(), auc_ci.c_str(), ba.c_str(), ba_ci.c_str());
        out += line;
    }
    out += "* best value in column for that site\n";
    if (!ci_note.empty()) out += "CI: " + ci_note + "\n";
    return out;
}

}  // namespace

std::string render_report_table(const ExperimentResult& result) {
    std::vector<TableRow> rows;
    for (const auto& method : result.methods)
        for (const auto& r : result.rows) {
            if (r.method != method) continue;
            rows.push_back({r.method, r.site, r.m.roc_auc, r.m.roc_auc_ci.lo, r.m.roc_auc_ci.hi,
                            r.m.balanced_accuracy, r.m.balanced_accuracy_ci.lo,
                            r.m.balanced_accuracy_ci.hi, false});
        }
    for (const auto& method : result.methods) {
        const auto& mm = result.macro_by_method.at(method);
        rows.push_back({method, "macro", mm.macro_roc_auc, 0, 0, mm.macro_balanced_accuracy, 0, 0,
                        true});
    }
    return render_rows(rows, "percentile bootstrap, B=" + std::to_string(kBootstrapResamples) +
                                 ", seeded");
}

std::string render_report_from_file(const std::filesystem::path& results_json) {
    std::ifstream in(results_json);
    if (!in) throw ConfigError("cannot open " + results_json.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("results file: " + std::string(e.what()));
    }
    std::vector<TableRow> rows;
    for (const auto& r : doc.at("results")) {
        TableRow row;
        row.method = r.at("method").get<std::string>();
        row.site = r.at("site").get<std::string>();
        row.auc = r.at("roc_auc").get<double>();
        row.auc_lo = r.at("roc_auc_ci")[0].get<double>();
        row.auc_hi = r.at("roc_auc_ci")[1].get<double>();
        row.ba = r.at("balanced_accuracy").get<double>();
        row.ba_lo = r.at("balanced_accuracy_ci")[0].get<double>();
        row.ba_hi = r.at("balanced_accuracy_ci")[1].get<double>();
        rows.push_back(std::move(row));
    }
    for (const auto& m : doc.at("macro")) {
        TableRow row;
        row.method = m.at("method").get<std::string>();
        row.site = "macro";
        row.auc = m.at("roc_auc").get<double>();
        row.ba = m.at("balanced_accuracy").get<double>();
        row.macro = true;
        rows.push_back(std::move(row));
    }
    std::string note = doc.contains("ci_method") ? doc["ci_method"].get<std::string>() : "";
    return render_rows(rows, note);
}

}  // namespace fedrun::run
