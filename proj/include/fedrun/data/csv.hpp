#pragma once

#include <filesystem>

#include "fedrun/data/cohort.hpp"

namespace fedrun::data {

// CSV schema: site_id,split,<label|ferritin>,<dim embedding columns>.
// When the third column is ferritin, labels are derived from the 15 ug/L
// threshold on load. All format errors report a 1-based line number.
CohortDataset load_embeddings_csv(const std::filesystem::path& path);

void write_cohort_csv(const std::filesystem::path& path, const CohortDataset& dataset);

}  // namespace fedrun::data
