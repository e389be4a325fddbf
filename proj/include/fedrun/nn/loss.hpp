#pragma once

#include <span>

#include "fedrun/errors.hpp"

namespace fedrun::nn {

struct BceLoss {
    double mean;
    double sum;  // negative log-likelihood summed over the batch
};

// Binary cross-entropy; probabilities are clamped to [1e-7, 1-1e-7] before the
// log so the result stays finite. Accumulates in 64-bit.
BceLoss bce_loss(std::span<const double> probabilities, std::span<const uint8_t> labels);

}  // namespace fedrun::nn
