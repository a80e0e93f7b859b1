#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsnet/dataset.hpp"
#include "tsnet/descriptor.hpp"
#include "tsnet/splits.hpp"

namespace tsnet {

// How to turn a CSV into a Dataset: which columns are features, label, and
// schema factors, plus the ingestion transforms. Factor columns hold 0-based
// integer level indices below the declared cardinality.
struct DatasetConfig {
    std::string path;
    char delimiter = ',';
    TaskKind kind = TaskKind::Regression;
    std::string label_column;
    std::vector<std::string> feature_columns;  // empty = all remaining columns
    std::vector<std::string> factor_columns;   // must match schema factor names
    std::optional<DescriptorSchema> schema;
    bool standardize = false;
    bool append_bias_feature = false;
    double split_fraction = 0.5;
    std::uint64_t split_seed = 0;
};

struct LoadedData {
    Dataset dataset;
    DescriptorSchema schema{{}, EncodingMode::Distributed, false};
    Split split;
    // Only the combined-record loaders fill these (restaurant).
    std::optional<DescriptorSchema> domain_schema;
    std::optional<DescriptorSchema> task_schema;
};

// Generic numeric CSV with a header row. Standardization statistics come
// from the training split only and are applied everywhere; the bias feature
// is appended after standardization.
LoadedData load_csv(const DatasetConfig& cfg);

// Exam-score regression over (school-id, year-group) domains. Expected
// columns: `school` (integer id), `year` (1..3), `score` (the target); every
// other column is a feature. With min_students_per_year > 0, only schools
// whose three year groups each exceed the threshold are retained; 0 keeps
// every school.
LoadedData load_school(const std::string& path, std::size_t min_students_per_year,
                       double split_fraction, std::uint64_t split_seed,
                       bool standardize, bool append_bias_feature,
                       bool shared_bias = false);

// Customer-to-restaurant scoring records: columns `restaurant`, `food`,
// `service`, `overall`, the rest features. Each record expands into three
// task-labelled instances; the 8 most frequently scored restaurants are
// kept. Descriptors are [8-bit domain, 3-bit task] concatenations.
LoadedData load_restaurant(const std::string& path, double split_fraction,
                           std::uint64_t split_seed, bool standardize,
                           bool append_bias_feature);

// Raw descriptor vectors, one row per class, no header. Used to feed
// attribute prototypes into the mtl/zsl protocols.
std::vector<Descriptor> load_descriptor_rows(const std::string& path,
                                             char delimiter = ',');

}  // namespace tsnet
