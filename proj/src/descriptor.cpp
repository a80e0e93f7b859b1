#include "tsnet/descriptor.hpp"

#include <set>

#include "tsnet/error.hpp"

namespace tsnet {

std::string_view encoding_mode_name(EncodingMode mode) {
    return mode == EncodingMode::Distributed ? "distributed" : "one_hot_atomic";
}

EncodingMode encoding_mode_from_name(std::string_view name) {
    if (name == "distributed") return EncodingMode::Distributed;
    if (name == "one_hot_atomic") return EncodingMode::OneHotAtomic;
    throw ValueError("unknown encoding mode '" + std::string(name) + "'");
}

DescriptorSchema::DescriptorSchema(std::vector<Factor> factors, EncodingMode mode,
                                   bool shared_bias)
    : factors_(std::move(factors)), mode_(mode), shared_bias_(shared_bias) {
    std::set<std::string> seen;
    for (const Factor& f : factors_) {
        if (f.cardinality == 0)
            throw ConfigError("schema: factor '" + f.name +
                              "' must have cardinality >= 1; continuous or periodic "
                              "descriptor variables are not supported");
        if (!seen.insert(f.name).second)
            throw ConfigError("schema: duplicate factor name '" + f.name + "'");
    }
}

std::size_t DescriptorSchema::encoded_length() const {
    std::size_t n = 0;
    if (mode_ == EncodingMode::Distributed) {
        for (const Factor& f : factors_) n += f.cardinality;
    } else {
        n = combination_count();
    }
    return n + (shared_bias_ ? 1 : 0);
}

std::size_t DescriptorSchema::combination_count() const {
    std::size_t n = 1;
    for (const Factor& f : factors_) n *= f.cardinality;
    return n;
}

Descriptor encode(const DescriptorSchema& schema, std::span<const std::size_t> levels) {
    const auto& factors = schema.factors();
    if (levels.size() != factors.size())
        throw ValueError("encode: " + std::to_string(levels.size()) + " levels for " +
                         std::to_string(factors.size()) + " factors");
    for (std::size_t f = 0; f < factors.size(); ++f)
        if (levels[f] >= factors[f].cardinality)
            throw ValueError("encode: level " + std::to_string(levels[f]) +
                             " out of range for factor '" + factors[f].name +
                             "' (cardinality " + std::to_string(factors[f].cardinality) +
                             ")");

    Descriptor d;
    d.levels.assign(levels.begin(), levels.end());
    d.encoded.assign(schema.encoded_length(), 0.0);

    if (schema.mode() == EncodingMode::Distributed) {
        std::size_t offset = 0;
        for (std::size_t f = 0; f < factors.size(); ++f) {
            d.encoded[offset + levels[f]] = 1.0;
            offset += factors[f].cardinality;
        }
    } else {
        d.encoded[combination_index(schema, levels)] = 1.0;
    }
    if (schema.shared_bias()) d.encoded.back() = 1.0;
    return d;
}

Descriptor concat_mdmt(const Descriptor& domain_desc, const Descriptor& task_desc) {
    Descriptor out;
    out.levels = domain_desc.levels;
    out.levels.insert(out.levels.end(), task_desc.levels.begin(), task_desc.levels.end());
    out.encoded = domain_desc.encoded;
    out.encoded.insert(out.encoded.end(), task_desc.encoded.begin(),
                       task_desc.encoded.end());
    return out;
}

Descriptor raw_descriptor(std::vector<double> values) {
    Descriptor d;
    d.encoded = std::move(values);
    return d;
}

Matrix schema_matrix(const DescriptorSchema& schema) {
    const std::size_t m = schema.combination_count();
    Matrix z(m, schema.encoded_length());
    for (std::size_t i = 0; i < m; ++i) {
        const auto levels = combination_levels(schema, i);
        const Descriptor d = encode(schema, levels);
        for (std::size_t j = 0; j < d.encoded.size(); ++j) z(i, j) = d.encoded[j];
    }
    return z;
}

std::vector<std::size_t> combination_levels(const DescriptorSchema& schema,
                                            std::size_t index) {
    const auto& factors = schema.factors();
    if (index >= schema.combination_count())
        throw ValueError("combination index " + std::to_string(index) + " out of range");
    std::vector<std::size_t> levels(factors.size(), 0);
    // Last factor varies fastest.
    for (std::size_t f = factors.size(); f-- > 0;) {
        levels[f] = index % factors[f].cardinality;
        index /= factors[f].cardinality;
    }
    return levels;
}

std::size_t combination_index(const DescriptorSchema& schema,
                              std::span<const std::size_t> levels) {
    const auto& factors = schema.factors();
    if (levels.size() != factors.size())
        throw ValueError("combination_index: wrong number of levels");
    std::size_t idx = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        if (levels[f] >= factors[f].cardinality)
            throw ValueError("combination_index: level out of range for factor '" +
                             factors[f].name + "'");
        idx = idx * factors[f].cardinality + levels[f];
    }
    return idx;
}

}  // namespace tsnet
