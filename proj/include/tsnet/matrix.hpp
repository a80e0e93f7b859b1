#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tsnet {

// Dense row-major matrix of doubles. Carries every 2-D quantity in the
// toolkit: the parameter matrices P and Q, descriptor tables, fixed
// structures, and model-tensor unfoldings. Desk-scale sizes only.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Standard product; throws ShapeError naming both operand shapes.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// Elementwise max(0, x).
Matrix relu(const Matrix& m);

// y += alpha * x.
void axpy(double alpha, const Matrix& x, Matrix& y);

void scale(Matrix& m, double alpha);

// Zeroes every entry of m whose mask entry is zero.
void apply_mask(Matrix& m, const Matrix& mask);

// Sum of absolute entries.
double norm_l1(const Matrix& w);

// Sum over rows of the row's Euclidean norm.
double norm_l21(const Matrix& w);

// Square root of the sum of squared entries.
double norm_fro(const Matrix& w);

// Row vector times matrix: x (len m.rows) * m -> len m.cols.
// Zero entries of x are skipped, so one-hot descriptors cost O(nnz * cols).
std::vector<double> vecmat(std::span<const double> x, const Matrix& m);

// Same, writing into a caller-owned buffer (resized as needed).
void vecmat_into(std::span<const double> x, const Matrix& m, std::vector<double>& out);

// Matrix times column vector: m * v -> len m.rows.
std::vector<double> matvec(const Matrix& m, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace tsnet
