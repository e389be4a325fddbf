#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedrun/errors.hpp"

namespace fedrun::data {

enum class Split : uint8_t { train, val, test };

const char* split_name(Split s);
Split split_from_name(const std::string& name);  // throws ConfigError

// Per-site embedding dataset: N x dim row-major embeddings with binary labels
// and split tags. Ferritin values are carried when known (generated or loaded)
// so label consistency can be checked; they are never a model feature.
struct CohortDataset {
    std::string site_id;
    size_t dim = 256;
    std::vector<float> embeddings;  // n() x dim
    std::vector<uint8_t> labels;
    std::vector<Split> split;
    std::vector<double> ferritin;  // empty if unknown

    size_t n() const { return labels.size(); }

    const float* row(size_t i) const { return embeddings.data() + i * dim; }

    std::vector<size_t> indices_of(Split s) const {
        std::vector<size_t> idx;
        for (size_t i = 0; i < split.size(); ++i)
            if (split[i] == s) idx.push_back(i);
        return idx;
    }

    void validate() const;
};

// label = 1 iff ferritin is strictly below 15 ug/L
int label_from_ferritin(double ferritin_ug_per_l);

// fraction of positives in one split; throws on an empty split
double prevalence(const CohortDataset& dataset, Split split);

// dims ranked by |mean(z | y=1) - mean(z | y=0)| descending, ties by index
std::vector<size_t> top_discriminative_dims(const CohortDataset& dataset, size_t k = 5);

}  // namespace fedrun::data
