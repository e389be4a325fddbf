#include "fedrun/fl/local_training.hpp"

#include "fedrun/nn/adam.hpp"
#include "fedrun/nn/loss.hpp"

namespace fedrun::fl {

void add_trainable(std::vector<float>& grad, const nn::ParamVector& term) {
    for (const auto& e : term.layout->entries()) {
        if (!e.trainable) continue;
        for (size_t i = e.offset; i < e.offset + e.size(); ++i) grad[i] += term.values[i];
    }
}

std::vector<double> predict(nn::MlpClassifier& net, const data::CohortDataset& dataset,
                            std::span<const size_t> rows) {
    constexpr size_t kChunk = 512;
    std::vector<double> probs;
    probs.reserve(rows.size());
    std::vector<float> batch;
    for (size_t start = 0; start < rows.size(); start += kChunk) {
        size_t n = std::min(kChunk, rows.size() - start);
        batch.assign(n * dataset.dim, 0.0f);
        for (size_t i = 0; i < n; ++i) {
            const float* r = dataset.row(rows[start + i]);
            std::copy(r, r + dataset.dim, batch.begin() + i * dataset.dim);
        }
        auto p = net.forward(batch, n, nn::Mode::eval);
        probs.insert(probs.end(), p.begin(), p.end());
    }
    return probs;
}

LocalTrainResult train_local_epochs(nn::MlpClassifier& net, const data::CohortDataset& dataset,
                                    const TrainConfig& train_cfg,
                                    const agg::StrategyConfig& strategy,
                                    const nn::ParamVector* theta_g,
                                    const MapRegulariserHooks* hooks, Rng& rng) {
    if (net.input_dim() != dataset.dim)
        throw ShapeError("model input dim does not match dataset embedding width");

    std::vector<size_t> train_idx = dataset.indices_of(data::Split::train);
    bool use_prox = strategy.kind == agg::StrategyKind::fedprox && strategy.mu_p != 0.0 &&
                    theta_g != nullptr;
    bool use_map = strategy.kind == agg::StrategyKind::fedmap && theta_g != nullptr;

    LocalTrainResult result;
    nn::AdamState adam;
    std::vector<float> batch;
    std::vector<uint8_t> labels;

    for (size_t epoch = 0; epoch < train_cfg.local_epochs; ++epoch) {
        rng.shuffle(train_idx);
        for (size_t start = 0; start < train_idx.size(); start += train_cfg.batch_size) {
            size_t n = std::min(train_cfg.batch_size, train_idx.size() - start);
            if (n < 2) {
                // batch norm needs at least two samples in train mode
                result.skipped_small_batches++;
                continue;
            }
            batch.assign(n * dataset.dim, 0.0f);
            labels.resize(n);
            for (size_t i = 0; i < n; ++i) {
                size_t row = train_idx[start + i];
                const float* r = dataset.row(row);
                std::copy(r, r + dataset.dim, batch.begin() + i * dataset.dim);
                labels[i] = dataset.labels[row];
            }

            net.forward(batch, n, nn::Mode::train, &rng);
            std::vector<float> grad = net.backward(labels);

            if (use_prox) {
                nn::ParamVector term =
                    agg::fedprox_gradient_term(net.to_params(), *theta_g, strategy.mu_p);
                add_trainable(grad, term);
            } else if (use_map) {
                // gradient of the per-sample-normalized MAP objective
                // (sum_nll + R)/N: the data term is already a mean, so the
                // prior gradient is scaled by 1/N
                double scale = 1.0 / static_cast<double>(train_idx.size());
                nn::ParamVector theta = net.to_params();
                nn::ParamVector term =
                    hooks && hooks->grad
                        ? hooks->grad(theta, *theta_g)
                        : nn::ParamVector::zeros_like(theta);
                if (!(hooks && hooks->grad)) {
                    // quadratic terms only: 2a(theta - theta_g) + 2e*theta
                    const auto& cfg = strategy.regulariser;
                    for (size_t i = 0; i < theta.size(); ++i)
                        term.values[i] = static_cast<float>(
                            2.0 * cfg.alpha * (static_cast<double>(theta.values[i]) -
                                               theta_g->values[i]) +
                            2.0 * cfg.epsilon * theta.values[i]);
                }
                for (float& v : term.values) v = static_cast<float>(v * scale);
                add_trainable(grad, term);
            }
            nn::adam_step(net.params(), grad, adam,
                          static_cast<float>(train_cfg.learning_rate));
        }
    }

    std::vector<double> probs = predict(net, dataset, train_idx);
    std::vector<uint8_t> train_labels(train_idx.size());
    for (size_t i = 0; i < train_idx.size(); ++i) train_labels[i] = dataset.labels[train_idx[i]];
    result.sum_nll = nn::bce_loss(probs, train_labels).sum;
    return result;
}

}  // namespace fedrun::fl
