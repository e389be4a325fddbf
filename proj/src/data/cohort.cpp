#include "fedrun/data/cohort.hpp"

#include <algorithm>
#include <cmath>

namespace fedrun::data {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw ConfigError("unknown split tag: " + name);
}

void CohortDataset::validate() const {
    if (labels.size() != split.size() || embeddings.size() != labels.size() * dim)
        throw ShapeError("cohort arrays are inconsistent");
    if (!ferritin.empty() && ferritin.size() != labels.size())
        throw ShapeError("ferritin column length mismatch");
    for (Split s : {Split::train, Split::val, Split::test}) {
        bool any = false;
        for (Split t : split)
            if (t == s) { any = true; break; }
        if (!any) throw ConfigError(std::string("split '") + split_name(s) + "' is empty");
    }
    bool pos = false, neg = false;
    for (size_t i = 0; i < labels.size(); ++i)
        if (split[i] == Split::train) (labels[i] ? pos : neg) = true;
    if (!pos || !neg) throw ConfigError("train split needs at least one sample of each class");
}

int label_from_ferritin(double f) {
    if (f < 0 || !std::isfinite(f)) throw ConfigError("ferritin must be a non-negative number");
    return f < 15.0 ? 1 : 0;
}

double prevalence(const CohortDataset& dataset, Split split) {
    size_t n = 0, pos = 0;
    for (size_t i = 0; i < dataset.n(); ++i)
        if (dataset.split[i] == split) {
            ++n;
            pos += dataset.labels[i];
        }
    if (n == 0) throw ConfigError(std::string("prevalence: split '") + split_name(split) + "' is empty");
    return static_cast<double>(pos) / static_cast<double>(n);
}

std::vector<size_t> top_discriminative_dims(const CohortDataset& dataset, size_t k) {
    if (k > dataset.dim) throw ConfigError("top_discriminative_dims: k exceeds embedding width");
    size_t n_pos = 0, n_neg = 0;
    for (uint8_t y : dataset.labels) (y ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw ConfigError("top_discriminative_dims: needs both classes present");

    std::vector<double> mean_pos(dataset.dim, 0.0), mean_neg(dataset.dim, 0.0);
    for (size_t i = 0; i < dataset.n(); ++i) {
        const float* r = dataset.row(i);
        auto& m = dataset.labels[i] ? mean_pos : mean_neg;
        for (size_t j = 0; j < dataset.dim; ++j) m[j] += r[j];
    }
    std::vector<double> gap(dataset.dim);
    for (size_t j = 0; j < dataset.dim; ++j)
        gap[j] = std::abs(mean_pos[j] / n_pos - mean_neg[j] / n_neg);

    std::vector<size_t> order(dataset.dim);
    for (size_t j = 0; j < dataset.dim; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (gap[a] != gap[b]) return gap[a] > gap[b];
        return a < b;
    });
    order.resize(k);
    return order;
}

}  // namespace fedrun::data
