#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tsnet/error.hpp"
#include "tsnet/model.hpp"
#include "tsnet/rng.hpp"

using namespace tsnet;

namespace {

TwoSidedModel tiny_relu_model(double q_value) {
    return TwoSidedModel(Matrix::from_rows({{2}, {3}}), Matrix::from_rows({{q_value}}),
                         Activation::Relu, false, std::nullopt);
}

TwoSidedModel random_model(std::size_t d, std::size_t b, std::size_t k,
                           Activation act, rng::Engine& eng) {
    return TwoSidedModel(oracles::random_matrix(d, k, eng),
                         oracles::random_matrix(b, k, eng), act, false, std::nullopt);
}

}  // namespace

TEST_CASE("forward by hand") {
    const std::vector<double> x{1, 0}, z{1};
    CHECK(tiny_relu_model(4).forward(x, z) == 8.0);
    // ReLU kills the negative branch.
    CHECK(tiny_relu_model(-4).forward(x, z) == 0.0);
}

TEST_CASE("forward matches the scalar triple-sum oracle") {
    rng::Engine eng(21);
    for (const auto act : {Activation::Relu, Activation::Linear}) {
        const auto model = random_model(10, 6, 4, act, eng);
        for (int rep = 0; rep < 20; ++rep) {
            const auto x = oracles::random_vector(10, eng);
            const auto z = oracles::random_vector(6, eng);
            const double want = oracles::forward_triple_sum(
                x, z, model.p(), model.q(), act == Activation::Relu);
            CHECK(model.forward(x, z) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("forward rejects mismatched vector lengths") {
    const auto model = tiny_relu_model(4);
    const std::vector<double> x{1, 0, 0}, z{1};
    CHECK_THROWS_AS(model.forward(x, z), ShapeError);
    const std::vector<double> x2{1, 0}, z2{1, 1};
    CHECK_THROWS_AS(model.forward(x2, z2), ShapeError);
}

TEST_CASE("backward on the symmetric 1x1x1 case") {
    const TwoSidedModel model(Matrix::from_rows({{1}}), Matrix::from_rows({{1}}),
                              Activation::Linear, false, std::nullopt);
    const std::vector<double> x{2}, z{3};
    const GradientPair g = model.backward(x, z, 1.0);
    CHECK(g.dp(0, 0) == 6.0);
    CHECK(g.dq(0, 0) == 6.0);
}

TEST_CASE("dead relu branch zeroes both gradients") {
    const auto model = tiny_relu_model(-4);
    const std::vector<double> x{5, -7}, z{1};
    const GradientPair g = model.backward(x, z, 2.5);
    CHECK(g.dp(0, 0) == 0.0);
    CHECK(g.dp(1, 0) == 0.0);
    CHECK(g.dq(0, 0) == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    rng::Engine eng(22);
    std::size_t done = 0;
    while (done < 60) {
        const auto act = rng::uniform_unit(eng) < 0.5 ? Activation::Relu
                                                      : Activation::Linear;
        const auto kind =
            rng::uniform_unit(eng) < 0.5 ? LossKind::Squared : LossKind::Hinge;
        const auto model = random_model(5, 4, 3, act, eng);
        const auto x = oracles::random_vector(5, eng);
        const auto z = oracles::random_vector(4, eng);
        const double y = kind == LossKind::Hinge
                             ? (rng::uniform_unit(eng) < 0.5 ? -1.0 : 1.0)
                             : rng::uniform(eng, -2, 2);

        // Stay away from relu and hinge kinks: finite differences are wrong there.
        const auto a = vecmat(z, model.q());
        bool near_kink = false;
        if (act == Activation::Relu)
            for (double v : a)
                if (std::abs(v) < 1e-4) near_kink = true;
        if (kind == LossKind::Hinge &&
            std::abs(1.0 - y * model.forward(x, z)) < 1e-4)
            near_kink = true;
        if (near_kink) continue;

        const auto check = oracles::fd_gradient_check(model, x, z, kind, y);
        CHECK(check.max_rel_err < 1e-4);
        ++done;
    }
}

TEST_CASE("effective weights: hand case and zero descriptor") {
    const auto model = tiny_relu_model(4);
    const std::vector<double> z{1};
    CHECK(model.effective_weights(z) == std::vector<double>{8, 12});

    const TwoSidedModel wide(Matrix::from_rows({{1, 2}, {3, 4}}),
                             Matrix::from_rows({{1, -1}, {2, 0.5}}), Activation::Relu,
                             false, std::nullopt);
    const std::vector<double> zero{0, 0};
    CHECK(wide.effective_weights(zero) == std::vector<double>{0, 0});
}

TEST_CASE("forward equals x . effective_weights for random models") {
    rng::Engine eng(23);
    const auto model = random_model(8, 5, 3, Activation::Relu, eng);
    const auto z = oracles::random_vector(5, eng);
    const auto w = model.effective_weights(z);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto x = oracles::random_vector(8, eng);
        worst = std::max(worst, std::abs(model.forward(x, z) - dot(x, w)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("init is deterministic per seed") {
    ModelStructure s;
    const auto m1 = TwoSidedModel::init(6, 4, 3, 99, s);
    const auto m2 = TwoSidedModel::init(6, 4, 3, 99, s);
    CHECK(m1.p().data() == m2.p().data());
    CHECK(m1.q().data() == m2.q().data());
    const auto m3 = TwoSidedModel::init(6, 4, 3, 100, s);
    CHECK(m1.p().data() != m3.p().data());
}

TEST_CASE("init draws lie within the fan-in bound") {
    ModelStructure s;
    const auto m = TwoSidedModel::init(16, 9, 4, 7, s);
    for (double v : m.p().data()) CHECK(std::abs(v) <= 1.0 / 4.0);
    for (double v : m.q().data()) CHECK(std::abs(v) <= 1.0 / 3.0);
}

TEST_CASE("all-zero mask pins Q to zero through updates") {
    ModelStructure s;
    s.q_mask = Matrix(3, 2);
    auto m = TwoSidedModel::init(4, 3, 2, 1, s);
    for (double v : m.q().data()) CHECK(v == 0.0);
    m.step(Matrix(4, 2, 0.5), Matrix(3, 2, 0.5));
    for (double v : m.q().data()) CHECK(v == 0.0);
}

TEST_CASE("fixed identity P reduces forward to x . act(zQ)") {
    ModelStructure s;
    s.activation = Activation::Linear;
    s.p_fixed = true;
    s.fixed_p = Matrix::identity(3);
    const auto m = TwoSidedModel::init(3, 2, 3, 5, s);
    rng::Engine eng(24);
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = oracles::random_vector(3, eng);
        const auto z = oracles::random_vector(2, eng);
        const auto g = m.right_activations(z);
        CHECK(m.forward(x, z) == doctest::Approx(dot(x, g)).epsilon(1e-12));
    }
    // Per-domain weights are rows of Q when z is a one-hot.
    const std::vector<double> e0{1, 0};
    const auto w = m.effective_weights(e0);
    for (std::size_t k = 0; k < 3; ++k) CHECK(w[k] == m.q()(0, k));
}

TEST_CASE("init rejects inconsistent structure shapes") {
    ModelStructure s;
    s.p_fixed = true;
    s.fixed_p = Matrix::identity(3);
    CHECK_THROWS_AS(TwoSidedModel::init(4, 2, 3, 0, s), ShapeError);
    ModelStructure s2;
    s2.q_mask = Matrix(2, 5);
    CHECK_THROWS_AS(TwoSidedModel::init(4, 2, 3, 0, s2), ShapeError);
    ModelStructure s3;
    CHECK_THROWS_AS(TwoSidedModel::init(4, 2, 0, 0, s3), ShapeError);
}

TEST_CASE("hidden_width values") {
    CHECK(hidden_width(23) == 8);
    CHECK(hidden_width(3) == 3);
    CHECK(hidden_width(43) == 12);
    CHECK_THROWS_AS(hidden_width(1), ValueError);
}

TEST_CASE("bilinearity in the linear-activation case") {
    rng::Engine eng(25);
    const Matrix p1 = oracles::random_matrix(5, 3, eng);
    const Matrix p2 = oracles::random_matrix(5, 3, eng);
    const Matrix q = oracles::random_matrix(4, 3, eng);
    const auto x = oracles::random_vector(5, eng);
    const auto z = oracles::random_vector(4, eng);
    const double alpha = 0.7, beta = -1.3;

    Matrix mix(5, 3);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix.data()[i] = alpha * p1.data()[i] + beta * p2.data()[i];

    const TwoSidedModel ma(p1, q, Activation::Linear, false, std::nullopt);
    const TwoSidedModel mb(p2, q, Activation::Linear, false, std::nullopt);
    const TwoSidedModel mc(mix, q, Activation::Linear, false, std::nullopt);
    CHECK(mc.forward(x, z) ==
          doctest::Approx(alpha * ma.forward(x, z) + beta * mb.forward(x, z))
              .epsilon(1e-10));
}

TEST_CASE("masking is preserved under backward") {
    rng::Engine eng(26);
    Matrix mask(4, 3);
    for (double& v : mask.data()) v = rng::uniform_unit(eng) < 0.5 ? 1.0 : 0.0;
    ModelStructure s;
    s.q_mask = mask;
    const auto m = TwoSidedModel::init(5, 4, 3, 3, s);
    const auto x = oracles::random_vector(5, eng);
    const auto z = oracles::random_vector(4, eng);
    const auto g = m.backward(x, z, 1.7);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask.data()[i] == 0.0) CHECK(g.dq.data()[i] == 0.0);
}

TEST_CASE("relu keeps g_Q nonnegative") {
    rng::Engine eng(27);
    const auto m = random_model(4, 6, 5, Activation::Relu, eng);
    for (int rep = 0; rep < 50; ++rep) {
        const auto z = oracles::random_vector(6, eng, -3, 3);
        for (double g : m.right_activations(z)) CHECK(g >= 0.0);
    }
}

TEST_CASE("checkpoint round-trips exactly") {
    Matrix mask(3, 2, 1.0);
    mask(1, 1) = 0.0;
    ModelStructure s;
    s.activation = Activation::Relu;
    s.q_mask = mask;
    const auto m = TwoSidedModel::init(4, 3, 2, 77, s);

    std::stringstream buf;
    m.save(buf);
    const auto back = TwoSidedModel::load(buf);
    CHECK(back.d() == 4);
    CHECK(back.b() == 3);
    CHECK(back.k() == 2);
    CHECK(back.activation() == Activation::Relu);
    CHECK(back.p_fixed() == false);
    CHECK(back.p().data() == m.p().data());
    CHECK(back.q().data() == m.q().data());
    REQUIRE(back.q_mask().has_value());
    CHECK(back.q_mask()->data() == mask.data());

    std::stringstream bad("tsnet_model v0\n");
    CHECK_THROWS_AS(TwoSidedModel::load(bad), ParseError);
}
