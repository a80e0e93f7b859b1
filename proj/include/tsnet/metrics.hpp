#pragma once

#include <span>

namespace tsnet {

// Root mean squared error.
double metric_rmse(std::span<const double> preds, std::span<const double> labels);

// Fraction of sign mismatches for binary {-1,+1} labels; a prediction of
// exactly 0 counts as +1.
double metric_error_rate(std::span<const double> preds, std::span<const double> labels);

// Fraction of exact class matches.
double metric_multiclass_acc(std::span<const std::size_t> preds,
                             std::span<const std::size_t> labels);

}  // namespace tsnet
