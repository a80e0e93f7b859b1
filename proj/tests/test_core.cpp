#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tsnet/error.hpp"
#include "tsnet/loss.hpp"
#include "tsnet/matrix.hpp"
#include "tsnet/rng.hpp"

using namespace tsnet;

TEST_CASE("matmul identity and hand dot product") {
    const Matrix id = Matrix::identity(2);
    const Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
    const Matrix r = matmul(id, b);
    CHECK(r(0, 0) == 5.0);
    CHECK(r(0, 1) == 6.0);
    CHECK(r(1, 0) == 7.0);
    CHECK(r(1, 1) == 8.0);

    const Matrix a = Matrix::from_rows({{1, 2}});
    const Matrix c = Matrix::from_rows({{3}, {4}});
    CHECK(matmul(a, c)(0, 0) == 11.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
    rng::Engine eng(11);
    const Matrix a = oracles::random_matrix(7, 5, eng);
    const Matrix b = oracles::random_matrix(5, 3, eng);
    const Matrix got = matmul(a, b);
    const Matrix want = oracles::matmul_triple_loop(a, b);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
}

TEST_CASE("matmul rejects mismatched shapes, naming both operands") {
    const Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(matmul(a, b), "matmul: shape mismatch 2x3 * 4x2", ShapeError);
}

TEST_CASE("matmul associativity on conforming triples") {
    rng::Engine eng(12);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix a = oracles::random_matrix(4, 6, eng);
        const Matrix b = oracles::random_matrix(6, 3, eng);
        const Matrix c = oracles::random_matrix(3, 5, eng);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < left.size(); ++i) {
            const double denom = std::max(1.0, std::abs(left.data()[i]));
            CHECK(std::abs(left.data()[i] - right.data()[i]) / denom < 1e-10);
        }
    }
}

TEST_CASE("relu definition and idempotence") {
    const Matrix v = Matrix::from_rows({{-1, 0, 2}});
    const Matrix r = relu(v);
    CHECK(r(0, 0) == 0.0);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(0, 2) == 2.0);

    const Matrix neg = Matrix::from_rows({{-3, -0.5, -1e9}});
    const Matrix neg_r = relu(neg);
    for (double x : neg_r.data()) CHECK(x == 0.0);

    const Matrix pos = Matrix::from_rows({{0, 1, 2.5}});
    CHECK(relu(pos).data() == pos.data());

    rng::Engine eng(13);
    const Matrix m = oracles::random_matrix(4, 4, eng);
    CHECK(relu(relu(m)).data() == relu(m).data());
}

TEST_CASE("loss values") {
    CHECK(loss(LossKind::Squared, 3.0, 1.0) == 4.0);
    CHECK(loss(LossKind::Hinge, 2.0, 1.0) == 0.0);
    CHECK(loss(LossKind::Hinge, -1.0, 1.0) == 2.0);
}

TEST_CASE("loss_grad values") {
    CHECK(loss_grad(LossKind::Squared, 3.0, 1.0) == 4.0);
    CHECK(loss_grad(LossKind::Hinge, 2.0, 1.0) == 0.0);
    CHECK(loss_grad(LossKind::Hinge, 0.0, 1.0) == -1.0);
    // Subgradient at the kink is pinned to 0.
    CHECK(loss_grad(LossKind::Hinge, 1.0, 1.0) == 0.0);
}

TEST_CASE("hinge rejects labels outside {-1,+1}") {
    CHECK_THROWS_AS(loss(LossKind::Hinge, 0.5, 0.0), ValueError);
    CHECK_THROWS_AS(loss_grad(LossKind::Hinge, 0.5, 2.0), ValueError);
}

TEST_CASE("loss nonnegativity and zero at the target") {
    rng::Engine eng(14);
    for (int rep = 0; rep < 50; ++rep) {
        const double yhat = rng::uniform(eng, -3, 3);
        const double y = rng::uniform(eng, -3, 3);
        CHECK(loss(LossKind::Squared, yhat, y) >= 0.0);
        CHECK(loss(LossKind::Squared, y, y) == 0.0);
        const double label = rng::uniform_unit(eng) < 0.5 ? -1.0 : 1.0;
        CHECK(loss(LossKind::Hinge, yhat, label) >= 0.0);
        if (yhat * label >= 1.0) CHECK(loss(LossKind::Hinge, yhat, label) == 0.0);
    }
}

TEST_CASE("norms on hand examples") {
    CHECK(norm_l21(Matrix::identity(2)) == 2.0);
    CHECK(norm_l21(Matrix::from_rows({{3, 4}, {0, 0}})) == 5.0);
    CHECK(norm_l1(Matrix::from_rows({{1, -2}, {3, 0}})) == 6.0);
    CHECK(norm_fro(Matrix::identity(3)) == doctest::Approx(std::sqrt(3.0)));
    const Matrix zero(3, 2);
    CHECK(norm_l1(zero) == 0.0);
    CHECK(norm_fro(zero) == 0.0);
    CHECK(norm_l21(zero) == 0.0);
}

TEST_CASE("norm_l21 matches the per-row oracle") {
    rng::Engine eng(15);
    const Matrix w = oracles::random_matrix(4, 3, eng);
    CHECK(norm_l21(w) == doctest::Approx(oracles::l21_per_row(w)).epsilon(1e-12));
}

TEST_CASE("norm ordering fro <= l21 <= l1 on random matrices") {
    rng::Engine eng(16);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix w = oracles::random_matrix(5, 4, eng, -2, 2);
        const double l1 = norm_l1(w), l21 = norm_l21(w), fro = norm_fro(w);
        CHECK(l21 <= l1 + 1e-12);
        CHECK(fro <= l21 + 1e-12);
    }
}

TEST_CASE("core ops keep finite inputs finite") {
    rng::Engine eng(17);
    const Matrix a = oracles::random_matrix(6, 6, eng, -1e3, 1e3);
    const Matrix b = oracles::random_matrix(6, 6, eng, -1e3, 1e3);
    CHECK(matmul(a, b).all_finite());
    CHECK(relu(a).all_finite());
    CHECK(transpose(a).all_finite());
}
