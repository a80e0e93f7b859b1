#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tsnet/matrix.hpp"

namespace tsnet {

// Stacks the per-domain linear models of a factored domain grid into a
// tensor of shape (D, p_1, ..., p_N): slice [:, l_1, ..., l_N] is the weight
// vector of the domain at grid cell (l_1, ..., l_N). A cell is observed or
// missing as a unit.
struct ModelTensor {
    std::size_t d = 0;
    std::vector<std::size_t> grid;     // p_1 .. p_N
    std::vector<double> values;        // cell-major: values[cell * d + j]
    std::vector<std::uint8_t> observed;  // one flag per grid cell

    std::size_t cell_count() const;
    // Lexicographic cell index, last factor varying fastest.
    std::size_t cell_index(std::span<const std::size_t> levels) const;

    std::span<double> slice(std::size_t cell) {
        return {values.data() + cell * d, d};
    }
    std::span<const double> slice(std::size_t cell) const {
        return {values.data() + cell * d, d};
    }
};

// Builds the tensor from (grid levels, weight vector) pairs. Assigning the
// same cell twice is a conflict.
ModelTensor tensor_store(
    std::size_t d, std::vector<std::size_t> grid,
    const std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>>& models);

struct CompletionResult {
    ModelTensor tensor;     // observed cells untouched, missing cells filled
    bool converged = false;
    bool identifiable = true;  // every mode index backed by an observed cell
    std::size_t iterations = 0;
    double residual = 0.0;  // RMS error over observed entries at the last iterate
};

// Rank-R CP factorization fitted by alternating least squares on the
// observed entries only; missing slices are read off the factorization.
// Stops early once the observed residual stalls; otherwise returns the best
// iterate with converged = false.
CompletionResult tensor_complete(const ModelTensor& t, std::size_t rank,
                                 std::size_t iters, std::uint64_t seed);

}  // namespace tsnet
