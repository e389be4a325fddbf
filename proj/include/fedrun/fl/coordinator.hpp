#pragma once

#include <map>
#include <optional>

#include "fedrun/clock.hpp"
#include "fedrun/fl/message.hpp"
#include "fedrun/fl/study.hpp"
#include "fedrun/fl/transport.hpp"
#include "fedrun/gov/audit.hpp"
#include "fedrun/icnn/regulariser.hpp"

namespace fedrun::fl {

struct SiteRoundMetrics {
    double val_roc_auc = 0.0;
    double val_balanced_accuracy = 0.0;
};

struct RoundRecord {
    uint32_t round = 0;
    std::map<std::string, SiteRoundMetrics> site_val;
    double macro_val_auc = 0.0;
    std::vector<double> aggregation_weights;  // roster order; fedmap only
};

struct FinalReport {
    std::string study_id;
    agg::StrategyKind strategy = agg::StrategyKind::fedavg;
    uint32_t rounds_executed = 0;
    std::string stop_reason;
    uint32_t best_round = 0;
    double best_macro_val_auc = -1.0;
    std::vector<RoundRecord> history;
    // deployment model per site at the best round: the broadcast global for
    // fedavg/fedprox, the site's own MAP-trained parameters for fedmap
    std::map<std::string, nn::ParamVector> final_site_models;
    nn::ParamVector final_global;
};

struct GovernanceHandle {
    std::span<const gov::PolicyRule> policy;
    gov::AuditLog* audit = nullptr;
    Clock* clock = nullptr;
};

// Runs the study: per round, broadcast the global model through the gate,
// collect one Update and one Metrics per roster site, aggregate with the
// configured strategy (FedMAP also refines psi), and evaluate early stopping
// on the macro validation ROC-AUC. Fails closed when a broadcast is denied
// or a round cannot collect every roster site.
//
// For FedMAP the caller owns psi (so in-process simulations can hand sites
// regulariser callbacks against the live network); when psi is null a
// private one is built from the study seed.
FinalReport coordinator_run(const StudyConfig& study, CoordinatorTransport& transport,
                            const GovernanceHandle& governance, icnn::Icnn* psi = nullptr);

}  // namespace fedrun::fl
