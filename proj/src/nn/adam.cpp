#include "fedrun/nn/adam.hpp"

#include <cmath>

#include "fedrun/errors.hpp"

namespace fedrun::nn {

void adam_step(std::span<float> params, std::span<const float> grads, AdamState& state, float lr) {
    if (params.size() != grads.size()) throw ShapeError("adam_step: shape mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0f);
        state.v.assign(params.size(), 0.0f);
        state.t = 0;
    } else if (state.m.size() != params.size()) {
        throw ShapeError("adam_step: optimizer state shape mismatch");
    }

    for (float g : grads)
        if (!std::isfinite(g)) throw TrainingError("adam_step: non-finite gradient");

    constexpr float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
    state.t += 1;
    float bc1 = 1.0f - static_cast<float>(std::pow(0.9, static_cast<double>(state.t)));
    float bc2 = 1.0f - static_cast<float>(std::pow(0.999, static_cast<double>(state.t)));

    float* p = params.data();
    const float* g = grads.data();
    float* m = state.m.data();
    float* v = state.v.data();
    for (size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
        float mhat = m[i] / bc1;
        float vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace fedrun::nn
