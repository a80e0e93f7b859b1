#include "tsnet/dataset.hpp"

#include <cstdint>

#include "tsnet/error.hpp"

namespace tsnet {

std::string_view task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::Regression: return "regression";
        case TaskKind::Binary: return "binary";
        case TaskKind::Multiclass: return "multiclass";
    }
    return "?";
}

TaskKind task_kind_from_name(std::string_view name) {
    if (name == "regression") return TaskKind::Regression;
    if (name == "binary") return TaskKind::Binary;
    if (name == "multiclass") return TaskKind::Multiclass;
    throw ValueError("unknown task kind '" + std::string(name) + "'");
}

std::size_t Dataset::add_group(std::string label, Descriptor descriptor) {
    groups.push_back({std::move(label), std::move(descriptor), {}});
    return groups.size() - 1;
}

std::size_t Dataset::add_instance(std::size_t group, std::vector<double> features,
                                  double target) {
    if (group >= groups.size())
        throw ValueError("dataset: instance references group " + std::to_string(group) +
                         " of " + std::to_string(groups.size()));
    if (feature_dim == 0) feature_dim = features.size();
    if (features.size() != feature_dim)
        throw ShapeError("dataset: instance has " + std::to_string(features.size()) +
                         " features, expected " + std::to_string(feature_dim));
    instances.push_back({std::move(features), target, group});
    groups[group].members.push_back(instances.size() - 1);
    return instances.size() - 1;
}

std::size_t Dataset::descriptor_dim() const {
    return groups.empty() ? 0 : groups.front().descriptor.length();
}

void Dataset::validate() const {
    const std::size_t b = descriptor_dim();
    for (const Group& g : groups)
        if (g.descriptor.length() != b)
            throw ShapeError("dataset: group '" + g.label + "' has descriptor length " +
                             std::to_string(g.descriptor.length()) + ", expected " +
                             std::to_string(b));
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Instance& inst = instances[i];
        if (inst.group >= groups.size())
            throw ValueError("dataset: instance " + std::to_string(i) +
                             " references missing group");
        if (inst.features.size() != feature_dim)
            throw ShapeError("dataset: instance " + std::to_string(i) +
                             " has inconsistent feature length");
    }
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> instance_ids) {
    Dataset out;
    out.kind = ds.kind;
    out.feature_dim = ds.feature_dim;

    std::vector<std::size_t> group_map(ds.groups.size(), SIZE_MAX);
    for (std::size_t id : instance_ids) {
        if (id >= ds.instances.size())
            throw ValueError("subset: instance id " + std::to_string(id) + " out of range");
        group_map[ds.instances[id].group] = 0;
    }
    for (std::size_t g = 0, next = 0; g < ds.groups.size(); ++g) {
        if (group_map[g] == SIZE_MAX) continue;
        group_map[g] = next++;
        out.groups.push_back({ds.groups[g].label, ds.groups[g].descriptor, {}});
    }
    for (std::size_t id : instance_ids) {
        const Instance& inst = ds.instances[id];
        out.add_instance(group_map[inst.group], inst.features, inst.target);
    }
    return out;
}

Dataset pooled(const Dataset& ds, Descriptor descriptor) {
    Dataset out;
    out.kind = ds.kind;
    out.feature_dim = ds.feature_dim;
    out.add_group("pooled", std::move(descriptor));
    for (const Instance& inst : ds.instances) out.add_instance(0, inst.features, inst.target);
    return out;
}

DescriptorSchema atomize_descriptors(Dataset& ds, bool shared_bias) {
    DescriptorSchema schema({{"group", ds.groups.size()}}, EncodingMode::OneHotAtomic,
                            shared_bias);
    for (std::size_t g = 0; g < ds.groups.size(); ++g) {
        const std::size_t levels[1] = {g};
        ds.groups[g].descriptor = encode(schema, levels);
    }
    return schema;
}

Dataset append_descriptor_features(const Dataset& ds) {
    Dataset out;
    out.kind = ds.kind;
    out.feature_dim = ds.feature_dim + ds.descriptor_dim();
    for (const Group& g : ds.groups) out.add_group(g.label, g.descriptor);
    for (const Instance& inst : ds.instances) {
        std::vector<double> x = inst.features;
        const auto z = ds.z_of(inst);
        x.insert(x.end(), z.begin(), z.end());
        out.add_instance(inst.group, std::move(x), inst.target);
    }
    return out;
}

}  // namespace tsnet
