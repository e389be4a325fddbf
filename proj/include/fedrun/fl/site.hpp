#pragma once

#include <span>

#include "fedrun/clock.hpp"
#include "fedrun/data/cohort.hpp"
#include "fedrun/fl/local_training.hpp"
#include "fedrun/fl/message.hpp"
#include "fedrun/fl/study.hpp"
#include "fedrun/fl/transport.hpp"
#include "fedrun/gov/audit.hpp"

namespace fedrun::fl {

struct SiteNodeConfig {
    std::string study_id;
    std::string site_id;
    agg::StrategyConfig strategy;
    TrainConfig train;
    ModelConfig model;
};

// Site-local state machine. Every outbound message passes the policy gate;
// a denied submission is logged and the node idles until the next broadcast.
class SiteNode {
public:
    SiteNode(SiteNodeConfig cfg, const data::CohortDataset* dataset, Session* session,
             std::span<const gov::PolicyRule> policy, gov::AuditLog* audit, Clock* clock,
             const MapRegulariserHooks* hooks = nullptr);

    // announce participation (gated Join)
    void start();

    void handle_frame(std::span<const uint8_t> frame);

    bool done() const { return done_; }
    uint32_t rounds_trained() const { return rounds_trained_; }
    size_t denied_sends() const { return denied_sends_; }

private:
    void on_global_model(const GlobalModel& g);

    SiteNodeConfig cfg_;
    const data::CohortDataset* dataset_;
    Session* session_;
    std::span<const gov::PolicyRule> policy_;
    gov::AuditLog* audit_;
    Clock* clock_;
    const MapRegulariserHooks* hooks_;
    Rng rng_;
    std::vector<size_t> val_idx_;
    // FedMAP keeps the site's personalised classifier across rounds; the
    // broadcast global enters only through the regulariser anchor
    std::optional<nn::ParamVector> personal_params_;
    bool done_ = false;
    uint32_t rounds_trained_ = 0;
    size_t denied_sends_ = 0;
};

// blocking receive loop for transports with real I/O (tcp site threads)
void site_run(SiteNode& node, Session& session, int recv_timeout_ms = -1);

}  // namespace fedrun::fl
