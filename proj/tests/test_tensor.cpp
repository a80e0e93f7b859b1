#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tsnet/error.hpp"
#include "tsnet/rng.hpp"
#include "tsnet/tensor_completion.hpp"

using namespace tsnet;

namespace {

// Rank-1 planted tensor T[d, i, j] = u_d v_i w_j over a 2x2 grid.
struct Rank1World {
    std::vector<double> u, v, w;

    std::vector<double> slice(std::size_t i, std::size_t j) const {
        std::vector<double> s(u.size());
        for (std::size_t d = 0; d < u.size(); ++d) s[d] = u[d] * v[i] * w[j];
        return s;
    }
};

Rank1World make_world(rng::Engine& eng, std::size_t d = 5) {
    Rank1World world;
    world.u = oracles::random_vector(d, eng, 0.5, 1.5);
    world.v = oracles::random_vector(2, eng, 0.5, 1.5);
    world.w = oracles::random_vector(2, eng, 0.5, 1.5);
    // Mix in signs so recovery is not trivially positive.
    world.u[1] *= -1.0;
    world.w[0] *= -1.0;
    return world;
}

}  // namespace

TEST_CASE("tensor_store places slices and tracks the observation mask") {
    rng::Engine eng(61);
    const Rank1World world = make_world(eng);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    models.push_back({{0, 0}, world.slice(0, 0)});
    models.push_back({{0, 1}, world.slice(0, 1)});
    models.push_back({{1, 0}, world.slice(1, 0)});

    const ModelTensor t = tensor_store(5, {2, 2}, models);
    CHECK(t.cell_count() == 4);
    std::size_t missing = 0;
    for (auto flag : t.observed)
        if (!flag) ++missing;
    CHECK(missing == 1);
    CHECK(!t.observed[t.cell_index(std::vector<std::size_t>{1, 1})]);

    // Stored slice reads back exactly.
    const auto back = t.slice(t.cell_index(std::vector<std::size_t>{0, 1}));
    const auto want = world.slice(0, 1);
    for (std::size_t d = 0; d < 5; ++d) CHECK(back[d] == want[d]);
}

TEST_CASE("tensor_store full grid has an all-ones mask") {
    rng::Engine eng(62);
    const Rank1World world = make_world(eng);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) models.push_back({{i, j}, world.slice(i, j)});
    const ModelTensor t = tensor_store(5, {2, 2}, models);
    for (auto flag : t.observed) CHECK(flag == 1);
}

TEST_CASE("tensor_store rejects duplicate cells") {
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    models.push_back({{0, 0}, std::vector<double>(5, 1.0)});
    models.push_back({{0, 0}, std::vector<double>(5, 2.0)});
    CHECK_THROWS_AS(tensor_store(5, {2, 2}, models), ValueError);
}

TEST_CASE("rank-1 completion recovers a hidden slice to high precision") {
    rng::Engine eng(63);
    const Rank1World world = make_world(eng);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    models.push_back({{0, 0}, world.slice(0, 0)});
    models.push_back({{0, 1}, world.slice(0, 1)});
    models.push_back({{1, 0}, world.slice(1, 0)});
    const ModelTensor t = tensor_store(5, {2, 2}, models);

    const CompletionResult res = tensor_complete(t, 1, 500, 99);
    CHECK(res.converged);
    CHECK(res.identifiable);

    const auto got = res.tensor.slice(res.tensor.cell_index(std::vector<std::size_t>{1, 1}));
    const auto want = world.slice(1, 1);
    double worst = 0.0;
    for (std::size_t d = 0; d < 5; ++d)
        worst = std::max(worst, std::abs(got[d] - want[d]));
    CHECK(worst < 1e-6);
}

TEST_CASE("completion never modifies observed entries") {
    rng::Engine eng(64);
    const Rank1World world = make_world(eng);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    models.push_back({{0, 0}, world.slice(0, 0)});
    models.push_back({{0, 1}, world.slice(0, 1)});
    models.push_back({{1, 0}, world.slice(1, 0)});
    const ModelTensor t = tensor_store(5, {2, 2}, models);

    // Rank 2 overfits rank-1 data; observed cells must still be bit-identical.
    const CompletionResult res = tensor_complete(t, 2, 200, 5);
    for (std::size_t cell = 0; cell < t.cell_count(); ++cell) {
        if (!t.observed[cell]) continue;
        const auto orig = t.slice(cell);
        const auto now = res.tensor.slice(cell);
        for (std::size_t d = 0; d < 5; ++d) CHECK(now[d] == orig[d]);
    }
}

TEST_CASE("fully observed tensor fits below 1e-8 residual at true rank and above") {
    rng::Engine eng(65);
    const Rank1World world = make_world(eng);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) models.push_back({{i, j}, world.slice(i, j)});
    const ModelTensor t = tensor_store(5, {2, 2}, models);

    for (const std::size_t rank : {std::size_t{1}, std::size_t{2}}) {
        const CompletionResult res = tensor_complete(t, rank, 500, 123);
        CHECK(res.residual < 1e-8);
    }
}

TEST_CASE("rank 0 is rejected") {
    const ModelTensor t = tensor_store(3, {2}, {{{0}, {1.0, 2.0, 3.0}}});
    CHECK_THROWS_AS(tensor_complete(t, 0, 10, 0), ValueError);
}

TEST_CASE("missing mode index flags the result as unidentifiable") {
    // Grid 2x2 with only column j=0 observed: index 1 of the last mode has
    // no observations at all.
    rng::Engine eng(66);
    const Rank1World world = make_world(eng);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    models.push_back({{0, 0}, world.slice(0, 0)});
    models.push_back({{1, 0}, world.slice(1, 0)});
    const ModelTensor t = tensor_store(5, {2, 2}, models);
    const CompletionResult res = tensor_complete(t, 1, 100, 3);
    CHECK(!res.identifiable);
}

TEST_CASE("three-mode grid completes a planted rank-1 tensor") {
    rng::Engine eng(67);
    std::vector<double> u = oracles::random_vector(4, eng, 0.5, 1.5);
    std::vector<double> v = oracles::random_vector(2, eng, 0.5, 1.5);
    std::vector<double> w = oracles::random_vector(3, eng, 0.5, 1.5);
    std::vector<double> s = oracles::random_vector(2, eng, 0.5, 1.5);

    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                if (i == 1 && j == 2 && k == 0) continue;  // hidden cell
                std::vector<double> slice(4);
                for (std::size_t d = 0; d < 4; ++d) slice[d] = u[d] * v[i] * w[j] * s[k];
                models.push_back({{i, j, k}, slice});
            }
    const ModelTensor t = tensor_store(4, {2, 3, 2}, models);
    const CompletionResult res = tensor_complete(t, 1, 500, 17);

    const auto got = res.tensor.slice(res.tensor.cell_index(std::vector<std::size_t>{1, 2, 0}));
    for (std::size_t d = 0; d < 4; ++d)
        CHECK(got[d] == doctest::Approx(u[d] * v[1] * w[2] * s[0]).epsilon(1e-6));
}
