#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fedrun/crypto.hpp"
#include "fedrun/errors.hpp"
#include "fedrun/nn/layout.hpp"

namespace fedrun::icnn {

// Input-convex network: every layer applies softplus to
//   u_i = W_z[i] z_{i-1} + W_x[i] x + b[i]
// where W_z entries are kept non-negative by projection and W_x is an
// unconstrained passthrough from the input. Softplus is convex and
// non-decreasing, so the output is convex in x by construction. The final
// layer has width 1. Runs in 64-bit; the network is server-side only and
// never serialized onto the wire.
class Icnn {
public:
    static Icnn build(size_t input_dim, const std::vector<size_t>& hidden_dims, uint64_t seed);

    size_t input_dim() const { return input_dim_; }
    const std::vector<size_t>& hidden_dims() const { return hidden_; }
    const nn::LayoutPtr& layout() const { return layout_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    double eval(std::span<const double> x) const;

    // d eval / d x
    std::vector<double> grad_input(std::span<const double> x) const;

    // d eval / d params, layout-aligned
    std::vector<double> grad_params(std::span<const double> x) const;

    // params -= lr * g
    void apply_param_step(std::span<const double> g, double lr);

    // clamp every propagation weight to max(0, w); idempotent
    void project();
    bool propagation_weights_nonneg() const;

    // SHA-256 over the canonical big-endian serialization of dims + params
    crypto::Hash256 digest() const;

private:
    struct Forward {
        std::vector<std::vector<double>> pre;  // u_i per layer
        std::vector<std::vector<double>> act;  // z_i per layer
    };
    Forward run(std::span<const double> x) const;

    size_t input_dim_ = 0;
    std::vector<size_t> hidden_;
    std::vector<size_t> ld_;  // layer output dims, last is 1
    nn::LayoutPtr layout_;
    std::vector<double> params_;
    std::vector<size_t> wx_off_, wz_off_, b_off_;  // wz_off_[0] unused
};

}  // namespace fedrun::icnn
