#pragma once

#include <functional>
#include <span>

#include "fedrun/agg/aggregate.hpp"
#include "fedrun/data/cohort.hpp"
#include "fedrun/fl/study.hpp"
#include "fedrun/nn/mlp.hpp"

namespace fedrun::fl {

// Coordinator-supplied access to the learned regulariser for in-process
// simulation; psi itself never travels to a site. Without hooks, MAP local
// steps use only the quadratic terms the site can compute from its config.
struct MapRegulariserHooks {
    std::function<double(const nn::ParamVector& theta, const nn::ParamVector& theta_g)> value;
    std::function<nn::ParamVector(const nn::ParamVector& theta, const nn::ParamVector& theta_g)>
        grad;
};

struct LocalTrainResult {
    double sum_nll = 0.0;  // eval-mode NLL over the training split, post-training
    size_t skipped_small_batches = 0;
};

// Runs local_epochs of minibatch Adam on the site's train split. theta_g is
// the round anchor for the FedProx term / MAP regulariser gradient; both are
// applied to trainable coordinates only (running statistics move only through
// the batch-norm update).
LocalTrainResult train_local_epochs(nn::MlpClassifier& net, const data::CohortDataset& dataset,
                                    const TrainConfig& train_cfg,
                                    const agg::StrategyConfig& strategy,
                                    const nn::ParamVector* theta_g,
                                    const MapRegulariserHooks* hooks, Rng& rng);

// eval-mode probabilities for the given rows
std::vector<double> predict(nn::MlpClassifier& net, const data::CohortDataset& dataset,
                            std::span<const size_t> rows);

// adds term's trainable coordinates into grad (layout from term)
void add_trainable(std::vector<float>& grad, const nn::ParamVector& term);

}  // namespace fedrun::fl
