#include "tsnet/tensor_completion.hpp"

#include <cmath>
#include <string>

#include "tsnet/error.hpp"
#include "tsnet/rng.hpp"

namespace tsnet {

std::size_t ModelTensor::cell_count() const {
    std::size_t n = 1;
    for (std::size_t p : grid) n *= p;
    return n;
}

std::size_t ModelTensor::cell_index(std::span<const std::size_t> levels) const {
    if (levels.size() != grid.size())
        throw ValueError("tensor: got " + std::to_string(levels.size()) +
                         " levels for a " + std::to_string(grid.size()) + "-factor grid");
    std::size_t idx = 0;
    for (std::size_t f = 0; f < grid.size(); ++f) {
        if (levels[f] >= grid[f])
            throw ValueError("tensor: level " + std::to_string(levels[f]) +
                             " out of range in mode " + std::to_string(f + 1));
        idx = idx * grid[f] + levels[f];
    }
    return idx;
}

ModelTensor tensor_store(
    std::size_t d, std::vector<std::size_t> grid,
    const std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>>& models) {
    if (d == 0) throw ValueError("tensor_store: D must be >= 1");
    for (std::size_t p : grid)
        if (p == 0) throw ValueError("tensor_store: zero-length grid mode");

    ModelTensor t;
    t.d = d;
    t.grid = std::move(grid);
    t.values.assign(t.cell_count() * d, 0.0);
    t.observed.assign(t.cell_count(), 0);

    for (const auto& [levels, weights] : models) {
        if (weights.size() != d)
            throw ShapeError("tensor_store: weight vector of length " +
                             std::to_string(weights.size()) + ", expected " +
                             std::to_string(d));
        const std::size_t cell = t.cell_index(levels);
        if (t.observed[cell])
            throw ValueError("tensor_store: duplicate assignment to grid cell " +
                             std::to_string(cell));
        t.observed[cell] = 1;
        auto dst = t.slice(cell);
        for (std::size_t j = 0; j < d; ++j) dst[j] = weights[j];
    }
    return t;
}

namespace {

// Small dense symmetric solve with partial pivoting and a light Tikhonov
// shift; ALS normal equations can be nearly singular when R exceeds the
// true rank.
std::vector<double> solve_small(std::vector<double> a, std::vector<double> rhs,
                                std::size_t n) {
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(a[i * n + i]));
    const double shift = peak > 0.0 ? peak * 1e-12 : 1e-12;
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += shift;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(rhs[col], rhs[pivot]);
        }
        const double diag = a[col * n + col];
        if (diag == 0.0) continue;  // row stays as-is; shift makes this unreachable
        const double inv = 1.0 / diag;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t col = n; col-- > 0;) {
        double acc = rhs[col];
        for (std::size_t j = col + 1; j < n; ++j) acc -= a[col * n + j] * out[j];
        out[col] = a[col * n + col] != 0.0 ? acc / a[col * n + col] : 0.0;
    }
    return out;
}

std::vector<std::size_t> cell_levels(const std::vector<std::size_t>& grid,
                                     std::size_t cell) {
    std::vector<std::size_t> levels(grid.size(), 0);
    for (std::size_t f = grid.size(); f-- > 0;) {
        levels[f] = cell % grid[f];
        cell /= grid[f];
    }
    return levels;
}

}  // namespace

CompletionResult tensor_complete(const ModelTensor& t, std::size_t rank,
                                 std::size_t iters, std::uint64_t seed) {
    if (rank == 0) throw ValueError("tensor_complete: rank must be >= 1");
    if (t.d == 0 || t.grid.empty()) throw ValueError("tensor_complete: empty tensor");

    const std::size_t n_modes = t.grid.size();
    const std::size_t cells = t.cell_count();

    std::vector<std::size_t> observed_cells;
    for (std::size_t c = 0; c < cells; ++c)
        if (t.observed[c]) observed_cells.push_back(c);
    if (observed_cells.empty())
        throw ValueError("tensor_complete: no observed cells to fit");

    std::vector<std::vector<std::size_t>> levels_of(cells);
    for (std::size_t c : observed_cells) levels_of[c] = cell_levels(t.grid, c);

    CompletionResult result;
    for (std::size_t m = 0; m < n_modes && result.identifiable; ++m) {
        std::vector<bool> seen(t.grid[m], false);
        for (std::size_t c : observed_cells) seen[levels_of[c][m]] = true;
        for (bool s : seen)
            if (!s) result.identifiable = false;
    }

    // Factors: u0 is d x R (feature mode), um[m] is p_m x R.
    rng::Engine eng(seed);
    Matrix u0(t.d, rank);
    for (double& v : u0.data()) v = rng::normal(eng);
    std::vector<Matrix> um;
    for (std::size_t m = 0; m < n_modes; ++m) {
        Matrix u(t.grid[m], rank);
        for (double& v : u.data()) v = rng::normal(eng);
        um.push_back(std::move(u));
    }

    // Product over grid modes of factor rows for one cell, optionally
    // skipping one mode.
    auto grid_product = [&](std::size_t cell, std::size_t skip,
                            std::vector<double>& out) {
        out.assign(rank, 1.0);
        const auto& levels = levels_of[cell];
        for (std::size_t m = 0; m < n_modes; ++m) {
            if (m == skip) continue;
            const auto row = um[m].row(levels[m]);
            for (std::size_t r = 0; r < rank; ++r) out[r] *= row[r];
        }
    };

    auto observed_residual = [&]() {
        std::vector<double> c;
        double sq = 0.0;
        for (std::size_t cell : observed_cells) {
            grid_product(cell, n_modes, c);
            const auto src = t.slice(cell);
            for (std::size_t j = 0; j < t.d; ++j) {
                double pred = 0.0;
                const auto row = u0.row(j);
                for (std::size_t r = 0; r < rank; ++r) pred += row[r] * c[r];
                const double e = src[j] - pred;
                sq += e * e;
            }
        }
        return std::sqrt(sq / static_cast<double>(observed_cells.size() * t.d));
    };

    double prev = observed_residual();
    std::vector<double> prod;
    for (std::size_t it = 0; it < iters; ++it) {
        // Grid modes: normal equations (q q') .* (u0' u0) per row.
        Matrix g0(rank, rank);
        for (std::size_t j = 0; j < t.d; ++j) {
            const auto row = u0.row(j);
            for (std::size_t r = 0; r < rank; ++r)
                for (std::size_t s = 0; s < rank; ++s) g0(r, s) += row[r] * row[s];
        }
        for (std::size_t m = 0; m < n_modes; ++m) {
            for (std::size_t i = 0; i < t.grid[m]; ++i) {
                std::vector<double> a(rank * rank, 0.0);
                std::vector<double> rhs(rank, 0.0);
                bool any = false;
                for (std::size_t cell : observed_cells) {
                    if (levels_of[cell][m] != i) continue;
                    any = true;
                    grid_product(cell, m, prod);
                    for (std::size_t r = 0; r < rank; ++r)
                        for (std::size_t s = 0; s < rank; ++s)
                            a[r * rank + s] += prod[r] * prod[s] * g0(r, s);
                    const auto src = t.slice(cell);
                    for (std::size_t j = 0; j < t.d; ++j) {
                        const auto row = u0.row(j);
                        for (std::size_t r = 0; r < rank; ++r)
                            rhs[r] += src[j] * row[r] * prod[r];
                    }
                }
                if (!any) continue;  // unidentifiable row keeps its init
                const auto sol = solve_small(std::move(a), std::move(rhs), rank);
                auto row = um[m].row(i);
                for (std::size_t r = 0; r < rank; ++r) row[r] = sol[r];
            }
        }

        // Feature mode: one Gram matrix, d right-hand sides.
        std::vector<double> a(rank * rank, 0.0);
        std::vector<std::vector<double>> cprod(observed_cells.size());
        for (std::size_t ci = 0; ci < observed_cells.size(); ++ci) {
            grid_product(observed_cells[ci], n_modes, cprod[ci]);
            for (std::size_t r = 0; r < rank; ++r)
                for (std::size_t s = 0; s < rank; ++s)
                    a[r * rank + s] += cprod[ci][r] * cprod[ci][s];
        }
        for (std::size_t j = 0; j < t.d; ++j) {
            std::vector<double> rhs(rank, 0.0);
            for (std::size_t ci = 0; ci < observed_cells.size(); ++ci) {
                const double v = t.slice(observed_cells[ci])[j];
                for (std::size_t r = 0; r < rank; ++r) rhs[r] += v * cprod[ci][r];
            }
            const auto sol = solve_small(a, std::move(rhs), rank);
            auto row = u0.row(j);
            for (std::size_t r = 0; r < rank; ++r) row[r] = sol[r];
        }

        result.iterations = it + 1;
        const double res = observed_residual();
        if (res < 1e-13 || std::abs(prev - res) <= 1e-13 * std::max(1.0, prev)) {
            prev = res;
            result.converged = true;
            break;
        }
        prev = res;
    }
    result.residual = prev;

    // Fill every cell from the factorization, then restore observed cells.
    result.tensor = t;
    std::vector<double> c;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        if (t.observed[cell]) continue;
        levels_of[cell] = cell_levels(t.grid, cell);
        grid_product(cell, n_modes, c);
        auto dst = result.tensor.slice(cell);
        for (std::size_t j = 0; j < t.d; ++j) {
            double pred = 0.0;
            const auto row = u0.row(j);
            for (std::size_t r = 0; r < rank; ++r) pred += row[r] * c[r];
            dst[j] = pred;
        }
    }
    return result;
}

}  // namespace tsnet
