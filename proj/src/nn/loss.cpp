#include "fedrun/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace fedrun::nn {

BceLoss bce_loss(std::span<const double> probabilities, std::span<const uint8_t> labels) {
    if (probabilities.size() != labels.size())
        throw ShapeError("bce_loss: probabilities and labels differ in length");
    if (probabilities.empty()) throw ShapeError("bce_loss: empty batch");

    double sum = 0.0;
    for (size_t i = 0; i < probabilities.size(); ++i) {
        double p = std::clamp(probabilities[i], 1e-7, 1.0 - 1e-7);
        sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    return {sum / static_cast<double>(probabilities.size()), sum};
}

}  // namespace fedrun::nn
