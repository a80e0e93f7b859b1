#include "tsnet/metrics.hpp"

#include <cmath>
#include <string>

#include "tsnet/error.hpp"

namespace tsnet {

namespace {

void check_lengths(std::size_t preds, std::size_t labels, const char* what) {
    if (preds == 0)
        throw ValueError(std::string(what) + ": empty evaluation");
    if (preds != labels)
        throw ShapeError(std::string(what) + ": " + std::to_string(preds) +
                         " predictions vs " + std::to_string(labels) + " labels");
}

}  // namespace

double metric_rmse(std::span<const double> preds, std::span<const double> labels) {
    check_lengths(preds.size(), labels.size(), "rmse");
    double sq = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double e = preds[i] - labels[i];
        sq += e * e;
    }
    return std::sqrt(sq / static_cast<double>(preds.size()));
}

double metric_error_rate(std::span<const double> preds, std::span<const double> labels) {
    check_lengths(preds.size(), labels.size(), "error_rate");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double sign = preds[i] >= 0.0 ? 1.0 : -1.0;
        if (sign != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

double metric_multiclass_acc(std::span<const std::size_t> preds,
                             std::span<const std::size_t> labels) {
    check_lengths(preds.size(), labels.size(), "accuracy");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace tsnet
