#pragma once

#include <cstdint>
#include <vector>

#include "tsnet/baselines.hpp"
#include "tsnet/dataset.hpp"
#include "tsnet/descriptor.hpp"
#include "tsnet/metrics.hpp"
#include "tsnet/optim.hpp"
#include "tsnet/report.hpp"
#include "tsnet/splits.hpp"

namespace tsnet {

struct ProtocolOptions {
    double split_fraction = 0.5;
    std::uint64_t split_seed = 0;
    double stl_lambda = 1e-2;   // l2 strength for the LR baselines
    std::size_t tc_rank = 0;    // 0 = pick by grid validation on held-in domains
    std::size_t tc_iters = 500;
    bool with_baselines = true;
};

// All domains learned together on the pooled training split; per-domain test
// metrics and their mean. MDL and ZSDA over the same (dataset, seed) share
// the same test sets by construction.
ExperimentReport run_mdl(const Dataset& ds, const TrainConfig& cfg,
                         const ModelStructure& structure, const ProtocolOptions& opts);

// Leave-one-domain-out: each domain's test-time model is synthesized from
// its descriptor with P, Q learned on the remaining domains. Requires a
// distributed schema; an atomic 1-of-N row would simply be untrained.
// Comparisons: blind-transfer LR with z appended as plain features, and the
// low-rank tensor-completion baseline (grid position only, no descriptor).
// fold_access, when given, receives per-fold training access counts indexed
// by original group.
ExperimentReport run_zsda(const Dataset& ds, const DescriptorSchema& schema,
                          const TrainConfig& cfg, const ModelStructure& structure,
                          const ProtocolOptions& opts,
                          std::vector<std::vector<std::size_t>>* fold_access = nullptr);

// One-vs-rest reduction: a single model trained on (instance, class
// descriptor, +/-1) pairs with hinge loss; prediction ranks all classes by
// forward score (ties to the lowest class index). The descriptor is never an
// input at test time since it would reveal the label.
ExperimentReport run_mtl_multiclass(const Dataset& ds,
                                    const std::vector<Descriptor>& class_descriptors,
                                    const TrainConfig& cfg,
                                    const ModelStructure& structure,
                                    const ProtocolOptions& opts);

// Zero-shot recognition over classes unseen in training: the model is
// trained one-vs-rest on the seen classes, then test instances are assigned
// argmax over the novel class descriptors.
ExperimentReport run_zsl(const Dataset& train_ds,
                         const std::vector<Descriptor>& seen_descriptors,
                         const std::vector<std::vector<double>>& test_features,
                         const std::vector<std::size_t>& test_labels,
                         const std::vector<Descriptor>& novel_descriptors,
                         const TrainConfig& cfg, const ModelStructure& structure,
                         const ProtocolOptions& opts);

// Simultaneous multi-domain multi-task learning over concatenated
// [z_domain, z_task] descriptors, with an atomic 1-of-(M*T) comparison run
// and the pooled all-records RMSE alongside.
ExperimentReport run_mdmt(const Dataset& ds, const TrainConfig& cfg,
                          const ModelStructure& structure, const ProtocolOptions& opts);

// Predicted class for one instance: argmax of forward scores over the given
// descriptors, ties to the lowest index.
std::size_t argmax_class(const TwoSidedModel& model, std::span<const double> x,
                         const std::vector<Descriptor>& descriptors);

}  // namespace tsnet
