#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "tsnet/dataset.hpp"
#include "tsnet/loss.hpp"
#include "tsnet/model.hpp"

namespace tsnet {

enum class RegKind { None, Frobenius, L1, L21 };

std::string_view reg_kind_name(RegKind kind);
RegKind reg_kind_from_name(std::string_view name);

// A structural regularizer lambda * norm(W). on_transpose takes the norm of
// W' instead, which matters only for the (2,1)-norm: row-wise on W' groups
// by feature rather than by task, the orientation the classic row-sparsity
// reconstruction needs.
struct RegSpec {
    RegKind kind = RegKind::None;
    double strength = 0.0;
    bool on_transpose = false;
};

// Per-domain averaging follows the 1/M, 1/N_i structure of the empirical
// risk; per-instance is the plain mean over the pooled data.
enum class DomainWeighting { PerDomainMean, PerInstanceMean };

std::string_view domain_weighting_name(DomainWeighting w);
DomainWeighting domain_weighting_from_name(std::string_view name);

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::Squared;
    std::size_t k = 0;  // 0 = auto, hidden_width(D)
    RegSpec reg_p;
    RegSpec reg_q;
    DomainWeighting domain_weighting = DomainWeighting::PerDomainMean;
    double momentum = 0.0;
    // Step size decays by lr_decay every lr_decay_every epochs.
    double lr_decay = 0.5;
    std::size_t lr_decay_every = 80;

    void validate() const;
};

// Everything train() observes along the way: the per-epoch objective curve,
// the final objective, and how many instances of each group were consumed
// (lets tests assert a held-out domain was never touched).
struct TrainTrace {
    std::vector<std::pair<std::size_t, double>> curve;
    double final_objective = 0.0;
    std::vector<std::size_t> group_access_counts;
};

// Value of the regularizer norm (without lambda).
double reg_norm(const RegSpec& spec, const Matrix& w);

// Subgradient of the norm at w: frobenius -> w/|w|_F, l1 -> sign(w),
// l21 -> rows scaled to unit norm; zero stays zero in all three.
Matrix reg_subgrad(const RegSpec& spec, const Matrix& w);

// The regularized empirical risk: domain-weighted mean loss plus
// lambda_P reg(P) + lambda_Q reg(Q). Empty domains are an error.
double objective(const TwoSidedModel& model, const Dataset& ds, const TrainConfig& cfg);

// Mini-batch SGD with seeded shuffling, optional classical momentum, and the
// structural constraints of `structure` enforced throughout. Deterministic
// per seed. Throws DivergenceError when the objective leaves the finite
// range.
TwoSidedModel train(const Dataset& ds, const TrainConfig& cfg,
                    const ModelStructure& structure, TrainTrace* trace = nullptr);

}  // namespace tsnet
