#pragma once

#include <string_view>

namespace tsnet {

// Squared error for regression targets, hinge for binary labels in {-1,+1}.
enum class LossKind { Squared, Hinge };

std::string_view loss_name(LossKind kind);
LossKind loss_from_name(std::string_view name);

// Squared: (yhat - y)^2 with no 1/2 factor (the factor is absorbed into the
// learning rate, keeping loss values comparable to squared-error metrics).
// Hinge: max(0, 1 - y * yhat); y must be exactly -1 or +1.
double loss(LossKind kind, double yhat, double y);

// d loss / d yhat. Hinge subgradient at the kink is 0.
double loss_grad(LossKind kind, double yhat, double y);

}  // namespace tsnet
