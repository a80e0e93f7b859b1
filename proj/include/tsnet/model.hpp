#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "tsnet/matrix.hpp"

namespace tsnet {

// Nonlinearity on the model-construction branch g_Q. The feature branch f_P
// is always linear here; a single inner-product layer per side.
enum class Activation { Relu, Linear };

std::string_view activation_name(Activation a);
Activation activation_from_name(std::string_view name);

// Structural constraints applied at init and preserved through training:
// a fixed feature map P (identity, replication, ...) and/or a binary mask
// pinning entries of Q to zero.
struct ModelStructure {
    Activation activation = Activation::Relu;
    bool p_fixed = false;
    Matrix fixed_p;                  // consulted only when p_fixed
    std::optional<Matrix> q_mask;    // B x K, zero entries of Q stay zero
};

struct GradientPair {
    Matrix dp;  // D x K, all-zero when P is fixed
    Matrix dq;  // B x K, respects the Q mask
};

// Reusable intermediates of a forward pass (h = xP and a = zQ); lets the
// trainer run forward + gradient accumulation without per-instance
// allocation.
struct WorkBuffers {
    std::vector<double> h;
    std::vector<double> a;
};

// The two-sided network: prediction is the inner product of the feature
// branch f_P(x) = xP and the model-construction branch g_Q(z) = act(zQ).
class TwoSidedModel {
public:
    TwoSidedModel(Matrix p, Matrix q, Activation activation, bool p_fixed,
                  std::optional<Matrix> q_mask);

    // Free entries are drawn uniformly from [-r, r] with r = 1/sqrt(fan-in)
    // of the respective layer; fixed and masked entries come from the
    // structure. Deterministic per seed.
    static TwoSidedModel init(std::size_t d, std::size_t b, std::size_t k,
                              std::uint64_t seed, const ModelStructure& structure);

    std::size_t d() const { return p_.rows(); }
    std::size_t b() const { return q_.rows(); }
    std::size_t k() const { return p_.cols(); }
    Activation activation() const { return activation_; }
    bool p_fixed() const { return p_fixed_; }
    const std::optional<Matrix>& q_mask() const { return q_mask_; }
    const Matrix& p() const { return p_; }
    const Matrix& q() const { return q_; }

    double forward(std::span<const double> x, std::span<const double> z) const;

    GradientPair backward(std::span<const double> x, std::span<const double> z,
                          double upstream) const;

    // Forward pass that keeps h and a around for accumulate_gradient.
    double forward_into(std::span<const double> x, std::span<const double> z,
                        WorkBuffers& wb) const;

    // Adds upstream * d yhat / d(P,Q) into acc. Skips dP when P is fixed;
    // the caller is responsible for masking acc.dq once per batch (backward
    // does this itself).
    void accumulate_gradient(const WorkBuffers& wb, std::span<const double> x,
                             std::span<const double> z, double upstream,
                             GradientPair& acc) const;

    // g_Q(z) = act(zQ), length K.
    std::vector<double> right_activations(std::span<const double> z) const;

    // w* = P act(zQ)', the effective linear model the network builds for z;
    // forward(x, z) == x . w* for every x.
    std::vector<double> effective_weights(std::span<const double> z) const;

    // Parameter update used by the trainer: P += dp (skipped when fixed),
    // Q += dq with the mask re-applied.
    void step(const Matrix& dp, const Matrix& dq);

    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static TwoSidedModel load(std::istream& in);
    static TwoSidedModel load_file(const std::string& path);

private:
    Matrix p_;
    Matrix q_;
    Activation activation_;
    bool p_fixed_;
    std::optional<Matrix> q_mask_;
};

// K = ceil(D / ln D), the hidden width that works well across datasets.
// Requires D >= 2.
std::size_t hidden_width(std::size_t d);

}  // namespace tsnet
