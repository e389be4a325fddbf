#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedrun/icnn/regulariser.hpp"
#include "fedrun/nn/param_vector.hpp"

namespace fedrun::agg {

// One site's contribution to a round: trained parameters plus the data-fit
// and regulariser summaries the server needs for posterior-informed weights.
struct ClientUpdate {
    std::string site_id;
    nn::ParamVector params;
    uint64_t n_samples = 0;
    double sum_nll = 0.0;   // -log P(D_k | theta_k) over the training split
    double reg_value = 0.0; // R(theta_k; theta_g, psi)
};

enum class StrategyKind { local, fedavg, fedprox, fedmap };
enum class LikelihoodScale { sum, mean };

struct StrategyConfig {
    StrategyKind kind = StrategyKind::fedavg;
    double mu_p = 0.05;
    icnn::RegulariserConfig regulariser;
    // The literal posterior weight uses the summed NLL, which lets a larger
    // client dominate through dataset size alone; default is per-sample mean.
    LikelihoodScale likelihood_scale = LikelihoodScale::mean;

    void validate() const {
        if (mu_p < 0) throw ConfigError("mu_p must be non-negative");
        regulariser.validate();
    }
};

const char* strategy_name(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);

// theta_g = sum_k (N_k / sum N) * theta_k
nn::ParamVector fedavg_aggregate(std::span<const ClientUpdate> updates);

// mu_p * (theta - theta_g), added to the task gradient during local epochs
nn::ParamVector fedprox_gradient_term(const nn::ParamVector& theta,
                                      const nn::ParamVector& theta_g, double mu_p);

// softmax over log w_k = -(likelihood term) - reg_value, via log-sum-exp
std::vector<double> fedmap_weights(std::span<const ClientUpdate> updates,
                                   const StrategyConfig& cfg);

// theta_g = sum_k w_k * theta_k with w from fedmap_weights
nn::ParamVector fedmap_aggregate(std::span<const ClientUpdate> updates, const StrategyConfig& cfg);

}  // namespace fedrun::agg
