#pragma once

#include <span>
#include <vector>

#include "fedrun/icnn/icnn.hpp"
#include "fedrun/nn/param_vector.hpp"

namespace fedrun::icnn {

struct RegulariserConfig {
    double alpha = 0.1;
    double epsilon = 1e-4;
    double icnn_lr = 1e-5;
    size_t icnn_steps = 3;
    std::vector<size_t> icnn_hidden{16};

    void validate() const {
        if (alpha < 0) throw ConfigError("alpha must be non-negative");
        if (epsilon < 0) throw ConfigError("epsilon must be non-negative");
        if (icnn_lr <= 0) throw ConfigError("icnn_lr must be positive");
        if (icnn_steps == 0) throw ConfigError("icnn_steps must be positive");
    }
};

// R(theta; theta_g, psi) = f_psi(theta - theta_g) + alpha*||theta - theta_g||^2
//                          + epsilon*(||theta||^2 + ||theta_g||^2)
double eval_regulariser(const nn::ParamVector& theta, const nn::ParamVector& theta_g,
                        const Icnn& psi, const RegulariserConfig& cfg);

// gradient w.r.t. theta, in 64-bit (used by the finite-difference oracle)
std::vector<double> grad_regulariser_theta_dense(const nn::ParamVector& theta,
                                                 const nn::ParamVector& theta_g, const Icnn& psi,
                                                 const RegulariserConfig& cfg);

// same gradient narrowed to a layout-aligned float vector
nn::ParamVector grad_regulariser_theta(const nn::ParamVector& theta,
                                       const nn::ParamVector& theta_g, const Icnn& psi,
                                       const RegulariserConfig& cfg);

struct WeightedTheta {
    const nn::ParamVector* theta;
    double weight;
};

// cfg.icnn_steps gradient steps at cfg.icnn_lr on sum_k w_k * R(theta_k; theta_g, psi),
// each followed by a convexity projection
void server_psi_step(Icnn& psi, std::span<const WeightedTheta> updates,
                     const nn::ParamVector& theta_g, const RegulariserConfig& cfg);

}  // namespace fedrun::icnn
