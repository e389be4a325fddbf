#include "fedrun/fl/coordinator.hpp"

#include <algorithm>
#include <chrono>

#include "fedrun/gov/gate.hpp"
#include "fedrun/nn/mlp.hpp"

namespace fedrun::fl {

namespace {

int64_t steady_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

struct Collected {
    std::optional<agg::ClientUpdate> update;
    std::optional<SiteRoundMetrics> metrics;
    bool complete() const { return update && metrics; }
};

void audit_event(const GovernanceHandle& gov, std::string kind, std::string subject,
                 std::string action, const std::string& study,
                 std::optional<uint32_t> round = {}) {
    gov::AuditEvent ev;
    ev.kind = std::move(kind);
    ev.subject = std::move(subject);
    ev.action = std::move(action);
    ev.resource = study;
    ev.timestamp_ms = gov.clock->now_ms();
    ev.round = round;
    gov.audit->append(ev);
}

}  // namespace

FinalReport coordinator_run(const StudyConfig& study, CoordinatorTransport& transport,
                            const GovernanceHandle& governance, icnn::Icnn* psi_in) {
    study.validate();
    const size_t n_sites = study.roster.size();
    const bool fedmap = study.strategy.kind == agg::StrategyKind::fedmap;
    const int window = transport.instant() ? 0 : study.window_ms();

    FinalReport report;
    report.study_id = study.study_id;
    report.strategy = study.strategy.kind;

    // --- join phase ---------------------------------------------------------
    transport.pump();
    std::vector<Session*> sessions = transport.await_connections(n_sites, study.window_ms());
    if (sessions.size() < n_sites) {
        report.stop_reason = "aborted: not all roster sites connected";
        return report;
    }
    std::map<std::string, Session*> by_site;
    for (Session* s : sessions) {
        auto frame = s->recv_frame(window);
        if (!frame) {
            report.stop_reason = "aborted: missing join";
            return report;
        }
        Message msg = decode(*frame);
        const auto* join = msg.as<Join>();
        if (!join || msg.study_id != study.study_id) {
            report.stop_reason = "aborted: bad join handshake";
            return report;
        }
        if (std::find(study.roster.begin(), study.roster.end(), join->site_id) ==
                study.roster.end() ||
            by_site.contains(join->site_id)) {
            report.stop_reason = "aborted: site not on roster: " + join->site_id;
            return report;
        }
        by_site[join->site_id] = s;
        audit_event(governance, "join", join->site_id, "join_study", study.study_id);
    }

    // --- model + regulariser state -------------------------------------------
    nn::MlpClassifier global = nn::build_mlp(study.model.layer_dims,
                                             static_cast<float>(study.model.dropout),
                                             init_seed(study.train));
    nn::ParamVector theta_g = global.to_params();
    std::optional<icnn::Icnn> psi_own;
    icnn::Icnn* psi = psi_in;
    if (fedmap && psi == nullptr) {
        psi_own = icnn::Icnn::build(theta_g.size(), study.strategy.regulariser.icnn_hidden,
                                    icnn_seed(study.train));
        psi = &*psi_own;
    }

    uint32_t no_improve = 0;
    // fedmap deploys each site's personalised model at that site's best
    // validated round; the global-model strategies deploy the broadcast
    // model of the best macro round
    std::map<std::string, double> site_best_auc;

    std::string stop_reason;
    for (uint32_t round = 1; round <= study.rounds; ++round) {
        // broadcast
        audit_event(governance, "broadcast", "coordinator", "global_model", study.study_id, round);
        Message gm{study.study_id, GlobalModel{round, theta_g, psi ? psi->digest()
                                                                   : crypto::Hash256{}}};
        bool denied = false;
        for (const auto& site : study.roster) {
            if (gov::gate_send(*by_site[site], gm, governance.policy, *governance.audit,
                               *governance.clock, site) == gov::GateResult::denied) {
                denied = true;
                break;
            }
        }
        if (denied) {
            stop_reason = "aborted: model broadcast denied by policy";
            audit_event(governance, "round_abort", "coordinator", "broadcast_denied",
                        study.study_id, round);
            break;
        }

        transport.pump();

        // collect exactly one Update and one Metrics per roster site
        std::map<std::string, Collected> got;
        int64_t deadline = window <= 0 ? -1 : steady_ms() + window;
        for (;;) {
            bool all = true;
            for (const auto& site : study.roster)
                if (!got[site].complete()) all = false;
            if (all) break;

            bool any_frame = false;
            for (const auto& site : study.roster) {
                Collected& c = got[site];
                if (c.complete()) continue;
                auto frame = by_site[site]->recv_frame(window == 0 ? 0 : 50);
                if (!frame) continue;
                any_frame = true;
                Message msg = decode(*frame);
                if (msg.study_id != study.study_id) continue;
                if (const auto* u = msg.as<Update>()) {
                    if (u->round == round && u->update.site_id == site && !c.update) {
                        c.update = u->update;
                        audit_event(governance, "update", site, "push_update", study.study_id,
                                    round);
                    }
                } else if (const auto* m = msg.as<MetricsMsg>()) {
                    if (m->round == round && m->site_id == site && !c.metrics)
                        c.metrics = SiteRoundMetrics{m->val_roc_auc, m->val_balanced_accuracy};
                }
            }
            if (window == 0 && !any_frame) break;  // instant transport: queues drained
            if (deadline >= 0 && steady_ms() > deadline) break;
        }

        std::vector<std::string> missing;
        for (const auto& site : study.roster)
            if (!got[site].complete()) missing.push_back(site);
        if (!missing.empty()) {
            stop_reason = "aborted: round " + std::to_string(round) +
                          " missing update from " + missing.front();
            audit_event(governance, "round_abort", missing.front(), "missing_update",
                        study.study_id, round);
            break;
        }

        // aggregate (roster order)
        std::vector<agg::ClientUpdate> updates;
        RoundRecord rec;
        rec.round = round;
        double macro_sum = 0.0;
        for (const auto& site : study.roster) {
            updates.push_back(std::move(*got[site].update));
            rec.site_val[site] = *got[site].metrics;
            macro_sum += got[site].metrics->val_roc_auc;
        }
        rec.macro_val_auc = macro_sum / static_cast<double>(n_sites);

        nn::ParamVector theta_prev = theta_g;
        if (fedmap) {
            // psi is server-owned: the coordinator recomputes every reg value
            // from the received parameters against the pre-aggregation global
            for (auto& u : updates)
                u.reg_value =
                    icnn::eval_regulariser(u.params, theta_prev, *psi, study.strategy.regulariser);
            rec.aggregation_weights = agg::fedmap_weights(updates, study.strategy);
            theta_g = agg::fedmap_aggregate(updates, study.strategy);
            std::vector<icnn::WeightedTheta> wt;
            for (size_t k = 0; k < updates.size(); ++k)
                wt.push_back({&updates[k].params, rec.aggregation_weights[k]});
            icnn::server_psi_step(*psi, wt, theta_prev, study.strategy.regulariser);
        } else {
            theta_g = agg::fedavg_aggregate(updates);
        }
        audit_event(governance, "aggregation", "coordinator", agg::strategy_name(study.strategy.kind),
                    study.study_id, round);
        report.rounds_executed = round;
        report.history.push_back(rec);

        if (fedmap) {
            for (size_t k = 0; k < study.roster.size(); ++k) {
                const std::string& site = study.roster[k];
                double auc = rec.site_val[site].val_roc_auc;
                auto it = site_best_auc.find(site);
                if (it == site_best_auc.end() ||
                    auc > it->second + study.improvement_threshold) {
                    site_best_auc[site] = auc;
                    report.final_site_models[site] = updates[k].params;
                }
            }
        }

        // early stopping on the macro validation ROC-AUC of the models
        // measured this round
        if (rec.macro_val_auc > report.best_macro_val_auc + study.improvement_threshold) {
            no_improve = 0;
            report.best_round = round;
            report.best_macro_val_auc = rec.macro_val_auc;
            if (!fedmap) {
                report.final_site_models.clear();
                for (const auto& site : study.roster)
                    report.final_site_models[site] = theta_prev;
            }
        } else {
            ++no_improve;
            if (no_improve >= study.patience) {
                stop_reason = "early stop: no improvement for " + std::to_string(study.patience) +
                              " rounds";
                break;
            }
        }
        if (round == study.rounds) stop_reason = "round limit reached";
    }

    if (report.final_site_models.empty())
        for (const auto& site : study.roster) report.final_site_models[site] = theta_g;
    report.final_global = theta_g;
    report.stop_reason = stop_reason.empty() ? "round limit reached" : stop_reason;

    Message stop{study.study_id, Stop{report.stop_reason}};
    for (const auto& site : study.roster)
        gov::gate_send(*by_site[site], stop, governance.policy, *governance.audit,
                       *governance.clock, site);
    transport.pump();

    audit_event(governance, "completion", "coordinator", report.stop_reason, study.study_id);
    return report;
}

}  // namespace fedrun::fl
