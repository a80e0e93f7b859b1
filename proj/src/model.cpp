#include "tsnet/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsnet/error.hpp"
#include "tsnet/rng.hpp"

namespace tsnet {

namespace {

void write_matrix(std::ostream& out, const Matrix& m) {
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << buf << (j + 1 == m.cols() ? "" : " ");
        }
        out << '\n';
    }
}

Matrix read_matrix(std::istream& in, std::size_t rows, std::size_t cols,
                   const char* what) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (!(in >> m(i, j)))
                throw ParseError(std::string("model checkpoint: truncated ") + what +
                                 " matrix");
    return m;
}

}  // namespace

std::string_view activation_name(Activation a) {
    return a == Activation::Relu ? "relu" : "linear";
}

Activation activation_from_name(std::string_view name) {
    if (name == "relu") return Activation::Relu;
    if (name == "linear") return Activation::Linear;
    throw ValueError("unknown activation '" + std::string(name) + "'");
}

TwoSidedModel::TwoSidedModel(Matrix p, Matrix q, Activation activation, bool p_fixed,
                             std::optional<Matrix> q_mask)
    : p_(std::move(p)),
      q_(std::move(q)),
      activation_(activation),
      p_fixed_(p_fixed),
      q_mask_(std::move(q_mask)) {
    if (p_.cols() != q_.cols() || p_.cols() == 0)
        throw ShapeError("model: P is " + std::to_string(p_.rows()) + "x" +
                         std::to_string(p_.cols()) + " but Q is " +
                         std::to_string(q_.rows()) + "x" + std::to_string(q_.cols()));
    if (q_mask_) {
        if (!q_mask_->same_shape(q_))
            throw ShapeError("model: Q mask shape does not match Q");
        apply_mask(q_, *q_mask_);
    }
}

TwoSidedModel TwoSidedModel::init(std::size_t d, std::size_t b, std::size_t k,
                                  std::uint64_t seed, const ModelStructure& structure) {
    if (k == 0) throw ShapeError("model init: K must be >= 1");
    if (d == 0 || b == 0) throw ShapeError("model init: D and B must be >= 1");
    if (structure.p_fixed &&
        (structure.fixed_p.rows() != d || structure.fixed_p.cols() != k))
        throw ShapeError("model init: fixed P is " +
                         std::to_string(structure.fixed_p.rows()) + "x" +
                         std::to_string(structure.fixed_p.cols()) + ", expected " +
                         std::to_string(d) + "x" + std::to_string(k));
    if (structure.q_mask &&
        (structure.q_mask->rows() != b || structure.q_mask->cols() != k))
        throw ShapeError("model init: Q mask is " +
                         std::to_string(structure.q_mask->rows()) + "x" +
                         std::to_string(structure.q_mask->cols()) + ", expected " +
                         std::to_string(b) + "x" + std::to_string(k));

    rng::Engine eng(seed);
    Matrix p(d, k);
    if (structure.p_fixed) {
        p = structure.fixed_p;
    } else {
        const double r = 1.0 / std::sqrt(static_cast<double>(d));
        for (double& v : p.data()) v = rng::uniform(eng, -r, r);
    }
    Matrix q(b, k);
    const double r = 1.0 / std::sqrt(static_cast<double>(b));
    for (double& v : q.data()) v = rng::uniform(eng, -r, r);

    return TwoSidedModel(std::move(p), std::move(q), structure.activation,
                         structure.p_fixed, structure.q_mask);
}

double TwoSidedModel::forward(std::span<const double> x, std::span<const double> z) const {
    WorkBuffers wb;
    return forward_into(x, z, wb);
}

double TwoSidedModel::forward_into(std::span<const double> x, std::span<const double> z,
                                   WorkBuffers& wb) const {
    vecmat_into(x, p_, wb.h);
    vecmat_into(z, q_, wb.a);
    double acc = 0.0;
    if (activation_ == Activation::Relu) {
        for (std::size_t kk = 0; kk < wb.h.size(); ++kk)
            if (wb.a[kk] > 0.0) acc += wb.h[kk] * wb.a[kk];
    } else {
        for (std::size_t kk = 0; kk < wb.h.size(); ++kk) acc += wb.h[kk] * wb.a[kk];
    }
    return acc;
}

std::vector<double> TwoSidedModel::right_activations(std::span<const double> z) const {
    auto a = vecmat(z, q_);
    if (activation_ == Activation::Relu)
        for (double& v : a)
            if (v < 0.0) v = 0.0;
    return a;
}

// d yhat / dP = x' g  and  d yhat / dQ = z' (h .* act'(a)),
// with act'(a) = 1[a > 0] for relu (0 exactly at the kink).
void TwoSidedModel::accumulate_gradient(const WorkBuffers& wb, std::span<const double> x,
                                        std::span<const double> z, double upstream,
                                        GradientPair& acc) const {
    const bool linear = activation_ == Activation::Linear;
    if (!p_fixed_) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) continue;
            const double sx = upstream * x[i];
            auto row = acc.dp.row(i);
            for (std::size_t kk = 0; kk < wb.a.size(); ++kk) {
                const double g = linear ? wb.a[kk] : (wb.a[kk] > 0.0 ? wb.a[kk] : 0.0);
                row[kk] += sx * g;
            }
        }
    }
    for (std::size_t bidx = 0; bidx < z.size(); ++bidx) {
        if (z[bidx] == 0.0) continue;
        const double sz = upstream * z[bidx];
        auto row = acc.dq.row(bidx);
        for (std::size_t kk = 0; kk < wb.a.size(); ++kk)
            if (linear || wb.a[kk] > 0.0) row[kk] += sz * wb.h[kk];
    }
}

GradientPair TwoSidedModel::backward(std::span<const double> x, std::span<const double> z,
                                     double upstream) const {
    WorkBuffers wb;
    forward_into(x, z, wb);
    GradientPair grad{Matrix(d(), k()), Matrix(b(), k())};
    accumulate_gradient(wb, x, z, upstream, grad);
    if (q_mask_) apply_mask(grad.dq, *q_mask_);
    return grad;
}

std::vector<double> TwoSidedModel::effective_weights(std::span<const double> z) const {
    const auto g = right_activations(z);
    return matvec(p_, g);
}

void TwoSidedModel::step(const Matrix& dp, const Matrix& dq) {
    if (!p_fixed_) axpy(1.0, dp, p_);
    axpy(1.0, dq, q_);
    if (q_mask_) apply_mask(q_, *q_mask_);
}

// Checkpoint layout, in this order: D, B, K, activation, p_fixed flag, P and
// Q row-major, then the Q mask if present. Text with %.17g so values
// round-trip exactly.
void TwoSidedModel::save(std::ostream& out) const {
    out << "tsnet_model v1\n";
    out << d() << ' ' << b() << ' ' << k() << '\n';
    out << activation_name(activation_) << '\n';
    out << (p_fixed_ ? 1 : 0) << '\n';
    write_matrix(out, p_);
    write_matrix(out, q_);
    out << (q_mask_ ? 1 : 0) << '\n';
    if (q_mask_) write_matrix(out, *q_mask_);
}

void TwoSidedModel::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    save(out);
    if (!out) throw Error("failed writing model checkpoint to '" + path + "'");
}

TwoSidedModel TwoSidedModel::load(std::istream& in) {
    std::string magic, version;
    in >> magic >> version;
    if (magic != "tsnet_model" || version != "v1")
        throw ParseError("model checkpoint: bad header");
    std::size_t d = 0, b = 0, k = 0;
    if (!(in >> d >> b >> k)) throw ParseError("model checkpoint: missing dimensions");
    std::string act;
    in >> act;
    int fixed = 0;
    if (!(in >> fixed)) throw ParseError("model checkpoint: missing p_fixed flag");
    Matrix p = read_matrix(in, d, k, "P");
    Matrix q = read_matrix(in, b, k, "Q");
    int has_mask = 0;
    if (!(in >> has_mask)) throw ParseError("model checkpoint: missing mask flag");
    std::optional<Matrix> mask;
    if (has_mask) mask = read_matrix(in, b, k, "mask");
    return TwoSidedModel(std::move(p), std::move(q), activation_from_name(act),
                         fixed != 0, std::move(mask));
}

TwoSidedModel TwoSidedModel::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model checkpoint '" + path + "'");
    return load(in);
}

std::size_t hidden_width(std::size_t d) {
    if (d < 2)
        throw ValueError("hidden_width: D must be >= 2, got " + std::to_string(d));
    const double k = static_cast<double>(d) / std::log(static_cast<double>(d));
    const auto width = static_cast<std::size_t>(std::ceil(k));
    return width < 1 ? 1 : width;
}

}  // namespace tsnet
