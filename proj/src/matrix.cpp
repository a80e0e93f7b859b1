#include "tsnet/matrix.hpp"

#include <cmath>
#include <string>

#include "tsnet/error.hpp"

namespace tsnet {

namespace {

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_)
        throw ShapeError("matrix: " + std::to_string(data_.size()) + " values for a " +
                         shape_of(*this) + " matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c)
            throw ShapeError("matrix: ragged initializer, row " + std::to_string(i) +
                             " has " + std::to_string(row.size()) + " of " +
                             std::to_string(c) + " columns");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: shape mismatch " + shape_of(a) + " * " + shape_of(b));
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

Matrix relu(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.data())
        if (v < 0.0) v = 0.0;
    return out;
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
    if (!x.same_shape(y))
        throw ShapeError("axpy: shape mismatch " + shape_of(x) + " vs " + shape_of(y));
    for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] += alpha * x.data()[i];
}

void scale(Matrix& m, double alpha) {
    for (double& v : m.data()) v *= alpha;
}

void apply_mask(Matrix& m, const Matrix& mask) {
    if (!m.same_shape(mask))
        throw ShapeError("mask: shape mismatch " + shape_of(m) + " vs " + shape_of(mask));
    for (std::size_t i = 0; i < m.size(); ++i)
        if (mask.data()[i] == 0.0) m.data()[i] = 0.0;
}

double norm_l1(const Matrix& w) {
    double total = 0.0;
    for (double v : w.data()) total += std::abs(v);
    return total;
}

double norm_l21(const Matrix& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < w.cols(); ++j) sq += w(i, j) * w(i, j);
        total += std::sqrt(sq);
    }
    return total;
}

double norm_fro(const Matrix& w) {
    double sq = 0.0;
    for (double v : w.data()) sq += v * v;
    return std::sqrt(sq);
}

std::vector<double> vecmat(std::span<const double> x, const Matrix& m) {
    std::vector<double> out;
    vecmat_into(x, m, out);
    return out;
}

void vecmat_into(std::span<const double> x, const Matrix& m, std::vector<double>& out) {
    if (x.size() != m.rows())
        throw ShapeError("vecmat: vector of length " + std::to_string(x.size()) +
                         " times " + shape_of(m));
    out.assign(m.cols(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += xi * row[j];
    }
}

std::vector<double> matvec(const Matrix& m, std::span<const double> v) {
    if (v.size() != m.cols())
        throw ShapeError("matvec: " + shape_of(m) + " times vector of length " +
                         std::to_string(v.size()));
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ShapeError("dot: lengths " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace tsnet
