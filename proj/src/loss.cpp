#include "tsnet/loss.hpp"

#include <string>

#include "tsnet/error.hpp"

namespace tsnet {

namespace {

void check_hinge_label(double y) {
    if (y != 1.0 && y != -1.0)
        throw ValueError("hinge loss: label must be -1 or +1, got " + std::to_string(y));
}

}  // namespace

std::string_view loss_name(LossKind kind) {
    return kind == LossKind::Squared ? "squared" : "hinge";
}

LossKind loss_from_name(std::string_view name) {
    if (name == "squared") return LossKind::Squared;
    if (name == "hinge") return LossKind::Hinge;
    throw ValueError("unknown loss kind '" + std::string(name) + "'");
}

double loss(LossKind kind, double yhat, double y) {
    switch (kind) {
        case LossKind::Squared: {
            const double d = yhat - y;
            return d * d;
        }
        case LossKind::Hinge: {
            check_hinge_label(y);
            const double margin = 1.0 - y * yhat;
            return margin > 0.0 ? margin : 0.0;
        }
    }
    return 0.0;
}

double loss_grad(LossKind kind, double yhat, double y) {
    switch (kind) {
        case LossKind::Squared:
            return 2.0 * (yhat - y);
        case LossKind::Hinge: {
            check_hinge_label(y);
            return (1.0 - y * yhat) > 0.0 ? -y : 0.0;
        }
    }
    return 0.0;
}

}  // namespace tsnet
