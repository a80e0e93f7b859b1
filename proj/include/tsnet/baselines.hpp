#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tsnet/dataset.hpp"
#include "tsnet/model.hpp"
#include "tsnet/optim.hpp"

namespace tsnet {

// Classic MTL/MDL algorithms, each realized as a structural configuration of
// the two-sided model: a descriptor table Z, a (possibly fixed) P, a mask on
// Q, and norms on P and Q'.
enum class BaselineName { STL, RMTL, FEDA, MTFL, GOMTL };

std::string_view baseline_name(BaselineName name);
BaselineName baseline_from_name(std::string_view name);

struct BaselineSpec {
    BaselineName name = BaselineName::STL;
    bool shared_bias = false;        // Z gains a trailing all-ones column
    ModelStructure structure;        // linear activation for all reconstructions
    RegSpec reg_p;
    RegSpec reg_q;
    std::size_t k = 0;               // 0 = derived (hidden_width) if P learnable
};

// Builds the Table-1 configuration for `domains` atomic domains over
// `feature_dim` features:
//   STL    Z = I           P = identity (fixed)   no regularizers
//   RMTL   Z = [I | 1]     P = identity (fixed)   no regularizers
//   FEDA   Z = [I | 1]     P = [I I ... I] fixed  Q masked to the shared
//                          (feature replication)  block + one block per domain
//   MTFL   Z = I           P = identity (fixed)   (2,1)-norm on Q'
//   GOMTL  Z = I           P learnable            Frobenius on P, l1 on Q
// Regularizer strengths default to `reg_strength` where the method uses one.
BaselineSpec make_baseline(BaselineName name, std::size_t domains,
                           std::size_t feature_dim, double reg_strength = 1e-3);

// One l2-regularized linear model per group: closed-form ridge via normal
// equations for squared loss, hinge trained through the optimizer otherwise.
// A singular system with lambda = 0 raises SingularError.
std::vector<std::vector<double>> stl_fit(const Dataset& ds, LossKind loss,
                                         double lambda, std::uint64_t seed = 0);

// Solves (X'X + lambda I) w = X'y for one design matrix; exposed because the
// blind-transfer baseline fits pooled systems directly.
std::vector<double> ridge_fit(const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys, double lambda);

}  // namespace tsnet
