#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsnet/descriptor.hpp"

namespace tsnet {

enum class TaskKind { Regression, Binary, Multiclass };

std::string_view task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(std::string_view name);

// One labelled example. The semantic descriptor lives on the group the
// instance belongs to; all instances of a domain/task share it.
struct Instance {
    std::vector<double> features;
    double target = 0.0;
    std::size_t group = 0;
};

// A domain, task, or (domain, task) cell, with its descriptor.
struct Group {
    std::string label;
    Descriptor descriptor;
    std::vector<std::size_t> members;
};

struct Dataset {
    TaskKind kind = TaskKind::Regression;
    std::size_t feature_dim = 0;
    std::vector<Instance> instances;
    std::vector<Group> groups;

    std::size_t add_group(std::string label, Descriptor descriptor);
    std::size_t add_instance(std::size_t group, std::vector<double> features,
                             double target);

    std::size_t descriptor_dim() const;
    std::span<const double> z_of(const Instance& inst) const {
        return groups[inst.group].descriptor.encoded;
    }

    // Shape and grouping consistency; throws on violation.
    void validate() const;
};

// New dataset containing only the listed instances. Groups left without
// members are dropped and the rest reindexed in original order.
Dataset subset(const Dataset& ds, std::span<const std::size_t> instance_ids);

// Collapses every instance into a single group carrying the given
// descriptor. Used for blind-transfer baselines.
Dataset pooled(const Dataset& ds, Descriptor descriptor);

// Replaces all group descriptors with a 1-of-N encoding of the group index
// (optionally with the shared bias column). Returns the schema used.
DescriptorSchema atomize_descriptors(Dataset& ds, bool shared_bias);

// Appends each instance's descriptor to its feature vector, so baselines see
// z as plain features. Group descriptors are left untouched.
Dataset append_descriptor_features(const Dataset& ds);

}  // namespace tsnet
