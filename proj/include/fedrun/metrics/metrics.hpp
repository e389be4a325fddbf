#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fedrun/errors.hpp"

namespace fedrun::metrics {

// Mann-Whitney ROC-AUC; tied scores get half credit. Matches the O(n^2)
// pairwise oracle exactly (both numerators are exact multiples of 1/2).
double roc_auc(std::span<const double> scores, std::span<const uint8_t> labels);

// (sensitivity + specificity) / 2 with predictions = score >= threshold
double balanced_accuracy(std::span<const double> scores, std::span<const uint8_t> labels,
                         double threshold);

// Maximizes balanced accuracy over midpoints between adjacent sorted unique
// scores; ties resolved to the lowest threshold. A single unique score is its
// own candidate.
double select_threshold(std::span<const double> val_scores, std::span<const uint8_t> val_labels);

struct Ci {
    double lo = 0.0, hi = 0.0;
};

using MetricFn = std::function<double(std::span<const double>, std::span<const uint8_t>)>;

// Percentile bootstrap (2.5th/97.5th), B resamples with replacement.
// Single-class resamples are redrawn with bounded retries. Deterministic
// given the seed.
Ci bootstrap_ci(std::span<const double> scores, std::span<const uint8_t> labels,
                const MetricFn& metric, size_t B, uint64_t seed);

struct SiteMetrics {
    double roc_auc = 0.0;
    Ci roc_auc_ci;
    double balanced_accuracy = 0.0;
    Ci balanced_accuracy_ci;
    double threshold = 0.0;
};

struct MacroMetrics {
    double macro_roc_auc = 0.0;
    double macro_balanced_accuracy = 0.0;
};

MacroMetrics macro(const SiteMetrics& a, const SiteMetrics& b);

// fixed 4-decimal formatting used by reports
std::string format4(double v);

}  // namespace fedrun::metrics
