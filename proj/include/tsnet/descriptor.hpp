#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsnet/matrix.hpp"

namespace tsnet {

// A categorical variable describing a domain or task, e.g. school-id or
// year-group. Levels are 0-based indices below the cardinality.
struct Factor {
    std::string name;
    std::size_t cardinality = 0;
};

// Distributed: one one-hot block per factor, so unseen level combinations
// still get a meaningful encoding. OneHotAtomic: a single indicator over all
// level combinations, the traditional 1-of-N task index.
enum class EncodingMode { OneHotAtomic, Distributed };

std::string_view encoding_mode_name(EncodingMode mode);
EncodingMode encoding_mode_from_name(std::string_view name);

// An encoded semantic descriptor z. For schema-encoded descriptors, levels
// records the factor levels it was built from; raw numeric descriptors
// (e.g. class attribute vectors) have empty levels.
struct Descriptor {
    std::vector<std::size_t> levels;
    std::vector<double> encoded;

    std::size_t length() const { return encoded.size(); }
};

class DescriptorSchema {
public:
    // Throws ConfigError on duplicate factor names or zero cardinality.
    DescriptorSchema(std::vector<Factor> factors, EncodingMode mode, bool shared_bias);

    const std::vector<Factor>& factors() const { return factors_; }
    EncodingMode mode() const { return mode_; }
    bool shared_bias() const { return shared_bias_; }

    // Encoded length B: sum of cardinalities (distributed) or their product
    // (atomic), plus one when the shared bias column is present.
    std::size_t encoded_length() const;

    // Number of distinct level combinations.
    std::size_t combination_count() const;

private:
    std::vector<Factor> factors_;
    EncodingMode mode_;
    bool shared_bias_;
};

// Encodes one level per factor; levels are 0-based. Out-of-range levels
// raise ValueError naming the offending factor.
Descriptor encode(const DescriptorSchema& schema, std::span<const std::size_t> levels);

// [z_domain, z_task] concatenation for simultaneous multi-domain multi-task
// learning. Level lists are concatenated as well.
Descriptor concat_mdmt(const Descriptor& domain_desc, const Descriptor& task_desc);

Descriptor raw_descriptor(std::vector<double> values);

// One row per level combination, enumerated lexicographically with the last
// factor varying fastest; row i equals encode() of the i-th combination.
Matrix schema_matrix(const DescriptorSchema& schema);

// Combination index <-> per-factor levels under the lexicographic order used
// by schema_matrix.
std::vector<std::size_t> combination_levels(const DescriptorSchema& schema, std::size_t index);
std::size_t combination_index(const DescriptorSchema& schema,
                              std::span<const std::size_t> levels);

}  // namespace tsnet
