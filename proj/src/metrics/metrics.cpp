#include "fedrun/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fedrun/rng.hpp"

namespace fedrun::metrics {

static void check_two_classes(std::span<const uint8_t> labels, const char* who) {
    bool pos = false, neg = false;
    for (uint8_t y : labels) (y ? pos : neg) = true;
    if (!pos || !neg) throw ConfigError(std::string(who) + ": needs both classes present");
}

double roc_auc(std::span<const double> scores, std::span<const uint8_t> labels) {
    if (scores.size() != labels.size()) throw ShapeError("roc_auc: length mismatch");
    check_two_classes(labels, "roc_auc");

    size_t n = scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    size_t n_pos = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        // average rank for the tie group [i, j), 1-based ranks
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (size_t k = i; k < j; ++k)
            if (labels[order[k]]) {
                rank_sum_pos += avg_rank;
                ++n_pos;
            }
        i = j;
    }
    size_t n_neg = n - n_pos;
    double numer = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
    return numer / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double balanced_accuracy(std::span<const double> scores, std::span<const uint8_t> labels,
                         double threshold) {
    if (scores.size() != labels.size()) throw ShapeError("balanced_accuracy: length mismatch");
    check_two_classes(labels, "balanced_accuracy");

    size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        bool pred = scores[i] >= threshold;
        if (labels[i])
            (pred ? tp : fn)++;
        else
            (pred ? fp : tn)++;
    }
    double sens = static_cast<double>(tp) / static_cast<double>(tp + fn);
    double spec = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return 0.5 * (sens + spec);
}

double select_threshold(std::span<const double> val_scores, std::span<const uint8_t> val_labels) {
    check_two_classes(val_labels, "select_threshold");

    std::vector<double> uniq(val_scores.begin(), val_scores.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    std::vector<double> candidates;
    if (uniq.size() == 1) {
        candidates.push_back(uniq[0]);
    } else {
        candidates.reserve(uniq.size() - 1);
        for (size_t i = 0; i + 1 < uniq.size(); ++i)
            candidates.push_back(0.5 * (uniq[i] + uniq[i + 1]));
    }

    double best_t = candidates.front();
    double best_ba = -1.0;
    for (double t : candidates) {
        double ba = balanced_accuracy(val_scores, val_labels, t);
        if (ba > best_ba) {
            best_ba = ba;
            best_t = t;
        }
    }
    return best_t;
}

Ci bootstrap_ci(std::span<const double> scores, std::span<const uint8_t> labels,
                const MetricFn& metric, size_t B, uint64_t seed) {
    if (scores.size() != labels.size()) throw ShapeError("bootstrap_ci: length mismatch");
    check_two_classes(labels, "bootstrap_ci");
    if (B == 0) throw ConfigError("bootstrap_ci: B must be positive");

    size_t n = scores.size();
    std::vector<double> stats;
    stats.reserve(B);
    std::vector<double> s(n);
    std::vector<uint8_t> y(n);
    for (size_t b = 0; b < B; ++b) {
        Rng rng(mix_seed(seed, b));  // per-resample stream, order-independent
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            bool pos = false, neg = false;
            for (size_t i = 0; i < n; ++i) {
                size_t j = rng.index(n);
                s[i] = scores[j];
                y[i] = labels[j];
                (y[i] ? pos : neg) = true;
            }
            ok = pos && neg;
        }
        if (!ok) throw TrainingError("bootstrap_ci: could not draw a two-class resample");
        stats.push_back(metric(s, y));
    }
    std::sort(stats.begin(), stats.end());

    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(stats.size() - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, stats.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return stats[lo] + frac * (stats[hi] - stats[lo]);
    };
    return {quantile(0.025), quantile(0.975)};
}

MacroMetrics macro(const SiteMetrics& a, const SiteMetrics& b) {
    return {0.5 * (a.roc_auc + b.roc_auc),
            0.5 * (a.balanced_accuracy + b.balanced_accuracy)};
}

std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace fedrun::metrics
