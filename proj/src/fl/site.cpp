#include "fedrun/fl/site.hpp"

#include "fedrun/gov/gate.hpp"
#include "fedrun/metrics/metrics.hpp"

namespace fedrun::fl {

SiteNode::SiteNode(SiteNodeConfig cfg, const data::CohortDataset* dataset, Session* session,
                   std::span<const gov::PolicyRule> policy, gov::AuditLog* audit, Clock* clock,
                   const MapRegulariserHooks* hooks)
    : cfg_(std::move(cfg)),
      dataset_(dataset),
      session_(session),
      policy_(policy),
      audit_(audit),
      clock_(clock),
      hooks_(hooks),
      rng_(site_seed(cfg_.train, cfg_.site_id)) {
    dataset_->validate();
    val_idx_ = dataset_->indices_of(data::Split::val);
}

void SiteNode::start() {
    Message join{cfg_.study_id, Join{cfg_.site_id}};
    if (gov::gate_send(*session_, join, policy_, *audit_, *clock_) == gov::GateResult::denied) {
        ++denied_sends_;
        done_ = true;  // not authorized for this study at all
    }
}

void SiteNode::handle_frame(std::span<const uint8_t> frame) {
    if (done_) return;
    Message msg = decode(frame);
    if (msg.study_id != cfg_.study_id) return;  // not ours; ignore
    if (const auto* g = msg.as<GlobalModel>()) {
        on_global_model(*g);
    } else if (msg.as<Stop>()) {
        done_ = true;
    }
}

void SiteNode::on_global_model(const GlobalModel& g) {
    bool personalised = cfg_.strategy.kind == agg::StrategyKind::fedmap;
    nn::MlpClassifier net = nn::build_mlp(cfg_.model.layer_dims,
                                          static_cast<float>(cfg_.model.dropout), 0);
    if (personalised && personal_params_) {
        net.from_params(*personal_params_);
        g.params.require_same_layout(*personal_params_);
    } else {
        net.from_params(g.params);  // throws on layout mismatch
    }

    auto val_metrics = [&](nn::MlpClassifier& m) {
        std::vector<double> probs = predict(m, *dataset_, val_idx_);
        std::vector<uint8_t> labels(val_idx_.size());
        for (size_t i = 0; i < val_idx_.size(); ++i) labels[i] = dataset_->labels[val_idx_[i]];
        double auc = metrics::roc_auc(probs, labels);
        double thr = metrics::select_threshold(probs, labels);
        double ba = metrics::balanced_accuracy(probs, labels, thr);
        return std::pair{auc, ba};
    };

    // the deployment candidate this round: the received global model for
    // fedavg/fedprox, the personalised post-training model for fedmap
    double val_auc = 0, val_ba = 0;
    if (!personalised) std::tie(val_auc, val_ba) = val_metrics(net);

    LocalTrainResult r =
        train_local_epochs(net, *dataset_, cfg_.train, cfg_.strategy, &g.params, hooks_, rng_);
    ++rounds_trained_;

    if (personalised) std::tie(val_auc, val_ba) = val_metrics(net);

    nn::ParamVector theta = net.to_params();
    if (personalised) personal_params_ = theta;
    double reg_value = 0.0;
    if (personalised && hooks_ && hooks_->value) reg_value = hooks_->value(theta, g.params);

    size_t n_train = dataset_->indices_of(data::Split::train).size();
    Message update{cfg_.study_id,
                   Update{g.round, agg::ClientUpdate{cfg_.site_id, std::move(theta),
                                                     static_cast<uint64_t>(n_train), r.sum_nll,
                                                     reg_value}}};
    if (gov::gate_send(*session_, update, policy_, *audit_, *clock_) == gov::GateResult::denied) {
        // denied before transmission: log and idle until the next broadcast
        ++denied_sends_;
        return;
    }

    Message metrics_msg{cfg_.study_id, MetricsMsg{g.round, cfg_.site_id, val_auc, val_ba}};
    if (gov::gate_send(*session_, metrics_msg, policy_, *audit_, *clock_) ==
        gov::GateResult::denied)
        ++denied_sends_;
}

void site_run(SiteNode& node, Session& session, int recv_timeout_ms) {
    node.start();
    while (!node.done()) {
        auto frame = session.recv_frame(recv_timeout_ms);
        if (!frame) break;  // peer gone or window elapsed
        node.handle_frame(*frame);
    }
}

}  // namespace fedrun::fl
