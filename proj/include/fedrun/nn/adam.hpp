#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fedrun::nn {

struct AdamState {
    std::vector<float> m, v;
    uint64_t t = 0;
};

// Standard Adam (beta1=0.9, beta2=0.999, eps=1e-8) with bias correction.
// State is initialized lazily to zeros on the first call. Throws
// TrainingError if any gradient coordinate is non-finite.
void adam_step(std::span<float> params, std::span<const float> grads, AdamState& state, float lr);

}  // namespace fedrun::nn
