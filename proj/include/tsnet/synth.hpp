#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tsnet/dataset.hpp"
#include "tsnet/descriptor.hpp"
#include "tsnet/matrix.hpp"

namespace tsnet {

// Planted worlds used by the acceptance and property suites:
//   bilinear_planted  y = (x P*) relu(z Q*)' + noise over a factor grid
//   additive_effects  y = x . (w0 + sum_f w_f[level] + w_task) + noise
//   attribute_classes instances cluster around unit prototypes that are
//                     linear images of per-class attribute vectors
enum class WorldKind { BilinearPlanted, AdditiveEffects, AttributeClasses };

std::string_view world_kind_name(WorldKind kind);
WorldKind world_kind_from_name(std::string_view name);

struct SyntheticSpec {
    WorldKind world = WorldKind::BilinearPlanted;
    std::size_t d = 10;
    std::vector<std::size_t> factor_cards = {2, 2};
    std::size_t k_true = 3;
    double noise = 0.0;
    std::size_t instances_per_domain = 50;
    std::uint64_t seed = 0;
    // additive_effects only: task count (0 = no task factor).
    std::size_t tasks = 0;
    // attribute_classes only.
    std::size_t classes = 0;
    std::size_t attr_dim = 0;

    void validate() const;
};

// The planted parameters, kept around so tests can score the generating
// model on its own data.
struct SynthOracle {
    WorldKind world = WorldKind::BilinearPlanted;
    // bilinear
    Matrix p_star;
    Matrix q_star;
    // additive
    std::vector<double> w0;
    std::vector<std::vector<std::vector<double>>> factor_effects;  // [factor][level]
    std::vector<std::vector<double>> task_effects;
    // attribute classes
    Matrix attr_map;                        // D x attr_dim
    std::vector<Descriptor> attributes;     // per class
    std::vector<std::vector<double>> prototypes;

    // Noise-free prediction for a feature vector under descriptor z / levels.
    double predict(std::span<const double> x, const Descriptor& desc) const;
};

struct SynthResult {
    Dataset dataset;
    DescriptorSchema schema{{}, EncodingMode::Distributed, false};
    SynthOracle oracle;
    // attribute_classes: the class descriptors (= oracle.attributes).
    std::vector<Descriptor> class_descriptors;
};

SynthResult synth_generate(const SyntheticSpec& spec);

// Writes the dataset in the layout load_csv expects: factor columns first
// (0-based levels), then features f0..f{D-1}, then the label column y.
void write_dataset_csv(const Dataset& ds, const DescriptorSchema& schema,
                       const std::string& path);

}  // namespace tsnet
