#pragma once

#include <cstdint>

#include "fedrun/data/cohort.hpp"

namespace fedrun::data {

struct LogNormal {
    double mu = 0.0;     // of log(ferritin)
    double sigma = 1.0;
};

struct SplitSpec {
    size_t n = 0;
    double prevalence = 0.5;  // strictly inside (0,1)
};

// Synthetic heterogeneous cohort: embeddings are standard normal except on
// signal_dims, where positives are shifted by effect_size. Ferritin is drawn
// per class from a log-normal and kept consistent with the label (positives
// strictly below the 15 ug/L threshold).
struct CohortSpec {
    std::string site_id;
    size_t dim = 256;
    SplitSpec train, val, test;
    std::vector<size_t> signal_dims;
    double effect_size = 1.0;
    LogNormal ferritin_pos;  // iron-deficient class
    LogNormal ferritin_neg;  // iron-replete class

    void validate() const;
};

CohortDataset generate_cohort(const CohortSpec& spec, uint64_t seed);

// Frozen site presets; scale multiplies every split size (scale 1.0 is the
// full cohort, 0.1 the desk-scale configuration).
CohortSpec preset(const std::string& name, double scale);
extern const char* const kPresetNames[2];  // {"aumc_like", "nhsbt_like"}

}  // namespace fedrun::data
