#include "fedrun/agg/aggregate.hpp"

#include <algorithm>
#include <cmath>

namespace fedrun::agg {

const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::local: return "local";
        case StrategyKind::fedavg: return "fedavg";
        case StrategyKind::fedprox: return "fedprox";
        case StrategyKind::fedmap: return "fedmap";
    }
    return "?";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "local") return StrategyKind::local;
    if (name == "fedavg") return StrategyKind::fedavg;
    if (name == "fedprox") return StrategyKind::fedprox;
    if (name == "fedmap") return StrategyKind::fedmap;
    throw ConfigError("unknown strategy: " + name);
}

static void check_updates(std::span<const ClientUpdate> updates) {
    if (updates.empty()) throw ConfigError("aggregation requires at least one client update");
    for (const auto& u : updates) {
        if (u.n_samples < 1) throw ConfigError("client update with zero samples");
        if (!std::isfinite(u.sum_nll) || !std::isfinite(u.reg_value))
            throw TrainingError("client update with non-finite likelihood or regulariser value");
        updates.front().params.require_same_layout(u.params);
    }
}

static nn::ParamVector weighted_average(std::span<const ClientUpdate> updates,
                                        std::span<const double> weights) {
    size_t n = updates.front().params.size();
    std::vector<double> acc(n, 0.0);
    for (size_t k = 0; k < updates.size(); ++k) {
        const auto& v = updates[k].params.values;
        double w = weights[k];
        for (size_t i = 0; i < n; ++i) acc[i] += w * static_cast<double>(v[i]);
    }
    std::vector<float> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = static_cast<float>(acc[i]);
    return nn::ParamVector(updates.front().params.layout, std::move(out));
}

nn::ParamVector fedavg_aggregate(std::span<const ClientUpdate> updates) {
    check_updates(updates);
    double total = 0.0;
    for (const auto& u : updates) total += static_cast<double>(u.n_samples);
    std::vector<double> w(updates.size());
    for (size_t k = 0; k < updates.size(); ++k)
        w[k] = static_cast<double>(updates[k].n_samples) / total;
    return weighted_average(updates, w);
}

nn::ParamVector fedprox_gradient_term(const nn::ParamVector& theta,
                                      const nn::ParamVector& theta_g, double mu_p) {
    theta.require_same_layout(theta_g);
    std::vector<float> out(theta.size());
    for (size_t i = 0; i < theta.size(); ++i)
        out[i] = static_cast<float>(mu_p * (static_cast<double>(theta.values[i]) -
                                            static_cast<double>(theta_g.values[i])));
    return nn::ParamVector(theta.layout, std::move(out));
}

std::vector<double> fedmap_weights(std::span<const ClientUpdate> updates,
                                   const StrategyConfig& cfg) {
    check_updates(updates);
    std::vector<double> logw(updates.size());
    for (size_t k = 0; k < updates.size(); ++k) {
        const auto& u = updates[k];
        double likelihood = cfg.likelihood_scale == LikelihoodScale::sum
                                ? u.sum_nll
                                : u.sum_nll / static_cast<double>(u.n_samples);
        logw[k] = -likelihood - u.reg_value;
    }
    // log-sum-exp normalization; exp(-sum_nll) would underflow for any real N
    double mx = *std::max_element(logw.begin(), logw.end());
    double denom = 0.0;
    for (double lw : logw) denom += std::exp(lw - mx);
    std::vector<double> w(updates.size());
    for (size_t k = 0; k < updates.size(); ++k) w[k] = std::exp(logw[k] - mx) / denom;
    return w;
}

nn::ParamVector fedmap_aggregate(std::span<const ClientUpdate> updates,
                                 const StrategyConfig& cfg) {
    std::vector<double> w = fedmap_weights(updates, cfg);
    return weighted_average(updates, w);
}

}  // namespace fedrun::agg
