#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedrun/agg/aggregate.hpp"
#include "fedrun/errors.hpp"
#include "fedrun/rng.hpp"

namespace fedrun::fl {

struct TrainConfig {
    double learning_rate = 1e-3;
    size_t batch_size = 256;
    size_t local_epochs = 10;
    uint64_t seed = 0;

    void validate() const {
        if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
    }
};

struct ModelConfig {
    std::vector<size_t> layer_dims{256, 128, 64, 1};
    double dropout = 0.3;
};

struct StudyConfig {
    std::string study_id;
    uint32_t rounds = 50;
    agg::StrategyConfig strategy;
    TrainConfig train;
    ModelConfig model;
    uint32_t patience = 3;
    std::vector<std::string> roster;
    // per-round collection window; 0 means unbounded (in-memory default)
    double window_seconds = 0;
    double improvement_threshold = 1e-4;

    void validate() const {
        if (study_id.empty()) throw ConfigError("study_id must not be empty");
        if (rounds < 1) throw ConfigError("rounds must be >= 1");
        if (patience < 1) throw ConfigError("patience must be >= 1");
        if (roster.empty()) throw ConfigError("participant roster must not be empty");
        train.validate();
        strategy.validate();
        if (model.layer_dims.size() < 2) throw ConfigError("model needs input and output dims");
        if (!(model.dropout >= 0 && model.dropout < 1))
            throw ConfigError("dropout must be in [0,1)");
    }

    int window_ms() const {
        return window_seconds <= 0 ? -1 : static_cast<int>(window_seconds * 1000.0);
    }
};

// derived seed streams so one master seed pins every random choice
inline uint64_t init_seed(const TrainConfig& tc) { return mix_seed(tc.seed, "model-init"); }
inline uint64_t icnn_seed(const TrainConfig& tc) { return mix_seed(tc.seed, "icnn-init"); }
inline uint64_t site_seed(const TrainConfig& tc, const std::string& site_id) {
    return mix_seed(mix_seed(tc.seed, "site"), site_id);
}

}  // namespace fedrun::fl
