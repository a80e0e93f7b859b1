#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tsnet/error.hpp"
#include "tsnet/metrics.hpp"
#include "tsnet/optim.hpp"
#include "tsnet/rng.hpp"
#include "tsnet/synth.hpp"

using namespace tsnet;

namespace {

// A single-group regression dataset around planted weights.
Dataset planted_linear(std::size_t n, const std::vector<double>& w, double noise,
                       rng::Engine& eng) {
    Dataset ds;
    ds.kind = TaskKind::Regression;
    ds.add_group("only", raw_descriptor({1.0}));
    for (std::size_t i = 0; i < n; ++i) {
        auto x = oracles::random_vector(w.size(), eng);
        const double y = dot(x, w) + noise * rng::normal(eng);
        ds.add_instance(0, std::move(x), y);
    }
    return ds;
}

// Domains = atomic one-hots, each with its own planted weight vector.
Dataset planted_multidomain(std::size_t domains, std::size_t d,
                            std::size_t per_domain, double noise, rng::Engine& eng,
                            std::vector<std::vector<double>>* w_out = nullptr) {
    DescriptorSchema schema({{"domain", domains}}, EncodingMode::OneHotAtomic, false);
    Dataset ds;
    ds.kind = TaskKind::Regression;
    for (std::size_t g = 0; g < domains; ++g) {
        const std::size_t levels[1] = {g};
        ds.add_group("domain-" + std::to_string(g), encode(schema, levels));
    }
    std::vector<std::vector<double>> weights;
    for (std::size_t g = 0; g < domains; ++g)
        weights.push_back(oracles::random_vector(d, eng));
    for (std::size_t g = 0; g < domains; ++g)
        for (std::size_t i = 0; i < per_domain; ++i) {
            auto x = oracles::random_vector(d, eng);
            const double y = dot(x, weights[g]) + noise * rng::normal(eng);
            ds.add_instance(g, std::move(x), y);
        }
    if (w_out) *w_out = weights;
    return ds;
}

ModelStructure identity_structure(std::size_t d) {
    ModelStructure s;
    s.activation = Activation::Linear;
    s.p_fixed = true;
    s.fixed_p = Matrix::identity(d);
    return s;
}

}  // namespace

TEST_CASE("objective on hand-weighted domains") {
    // One domain, one instance: squared loss of (yhat=3, y=1) is 4. The model
    // below predicts 3 for x=[1], z=[1].
    const TwoSidedModel m(Matrix::from_rows({{3}}), Matrix::from_rows({{1}}),
                          Activation::Linear, false, std::nullopt);
    Dataset one;
    one.kind = TaskKind::Regression;
    one.add_group("a", raw_descriptor({1.0}));
    one.add_instance(0, {1.0}, 1.0);
    TrainConfig cfg;
    CHECK(objective(m, one, cfg) == 4.0);

    // Two domains of sizes 1 and 3 with losses {4} and {0,0,0}.
    Dataset two;
    two.kind = TaskKind::Regression;
    two.add_group("a", raw_descriptor({1.0}));
    two.add_group("b", raw_descriptor({1.0}));
    two.add_instance(0, {1.0}, 1.0);
    for (int i = 0; i < 3; ++i) two.add_instance(1, {1.0}, 3.0);
    cfg.domain_weighting = DomainWeighting::PerDomainMean;
    CHECK(objective(m, two, cfg) == 2.0);
    cfg.domain_weighting = DomainWeighting::PerInstanceMean;
    CHECK(objective(m, two, cfg) == 1.0);
}

TEST_CASE("objective matches the two-loop oracle on random data") {
    rng::Engine eng(31);
    std::vector<std::vector<double>> w;
    const Dataset ds = planted_multidomain(3, 4, 5, 0.3, eng, &w);
    const TwoSidedModel m(oracles::random_matrix(4, 2, eng),
                          oracles::random_matrix(3, 2, eng), Activation::Relu, false,
                          std::nullopt);
    for (const auto weighting :
         {DomainWeighting::PerDomainMean, DomainWeighting::PerInstanceMean}) {
        TrainConfig cfg;
        cfg.domain_weighting = weighting;
        cfg.reg_p = {RegKind::Frobenius, 0.05, false};
        cfg.reg_q = {RegKind::L1, 0.02, false};
        CHECK(objective(m, ds, cfg) ==
              doctest::Approx(oracles::objective_two_loop(m, ds, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("objective rejects empty domains") {
    Dataset ds;
    ds.kind = TaskKind::Regression;
    ds.add_group("a", raw_descriptor({1.0}));
    ds.add_group("empty", raw_descriptor({1.0}));
    ds.add_instance(0, {1.0}, 1.0);
    const TwoSidedModel m(Matrix::from_rows({{1}}), Matrix::from_rows({{1}}),
                          Activation::Linear, false, std::nullopt);
    TrainConfig cfg;
    CHECK_THROWS_AS(objective(m, ds, cfg), ValueError);
}

TEST_CASE("reg_subgrad hand examples") {
    const Matrix l1_in = Matrix::from_rows({{2, -3}, {0, 1}});
    const Matrix l1_out = reg_subgrad({RegKind::L1, 1.0, false}, l1_in);
    CHECK(l1_out.data() == std::vector<double>{1, -1, 0, 1});

    const Matrix l21_in = Matrix::from_rows({{3, 4}, {0, 0}});
    const Matrix l21_out = reg_subgrad({RegKind::L21, 1.0, false}, l21_in);
    CHECK(l21_out(0, 0) == doctest::Approx(0.6));
    CHECK(l21_out(0, 1) == doctest::Approx(0.8));
    CHECK(l21_out(1, 0) == 0.0);
    CHECK(l21_out(1, 1) == 0.0);

    const Matrix zero(2, 2);
    for (const auto kind : {RegKind::Frobenius, RegKind::L1, RegKind::L21}) {
        const Matrix g = reg_subgrad({kind, 1.0, false}, zero);
        for (double v : g.data()) CHECK(v == 0.0);
    }
}

TEST_CASE("reg_subgrad matches finite differences of the norm") {
    rng::Engine eng(32);
    for (const auto kind : {RegKind::Frobenius, RegKind::L1, RegKind::L21}) {
        for (const bool on_t : {false, true}) {
            const RegSpec spec{kind, 1.0, on_t};
            // Keep entries away from the nonsmooth points of l1/l21.
            Matrix w = oracles::random_matrix(3, 4, eng, 0.3, 1.5);
            for (std::size_t i = 0; i < w.size(); ++i)
                if (rng::uniform_unit(eng) < 0.5) w.data()[i] *= -1.0;
            const Matrix g = reg_subgrad(spec, w);
            const double h = 1e-5;
            for (std::size_t i = 0; i < w.size(); ++i) {
                Matrix hi = w, lo = w;
                hi.data()[i] += h;
                lo.data()[i] -= h;
                const double fd = (reg_norm(spec, hi) - reg_norm(spec, lo)) / (2 * h);
                CHECK(g.data()[i] == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("l21 on the transpose groups by column") {
    const Matrix w = Matrix::from_rows({{3, 0}, {4, 0}});
    CHECK(reg_norm({RegKind::L21, 1.0, false}, w) == doctest::Approx(7.0));
    CHECK(reg_norm({RegKind::L21, 1.0, true}, w) == doctest::Approx(5.0));
}

TEST_CASE("train converges to the least-squares solution") {
    rng::Engine eng(33);
    const std::vector<double> w_true{1.5, -2.0, 0.5, 3.0, -1.0};
    const Dataset ds = planted_linear(50, w_true, 0.1, eng);

    TrainConfig cfg;
    cfg.loss = LossKind::Squared;
    cfg.learning_rate = 0.05;
    cfg.epochs = 400;
    cfg.lr_decay_every = 100;
    cfg.seed = 5;
    const TwoSidedModel model = train(ds, cfg, identity_structure(5));

    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (const auto& inst : ds.instances) {
        xs.push_back(inst.features);
        ys.push_back(inst.target);
    }
    const auto w_ls = oracles::normal_equations(xs, ys, 0.0);
    const auto w_got = model.effective_weights(std::vector<double>{1.0});

    std::vector<double> p_ls, p_got;
    for (const auto& x : xs) {
        p_ls.push_back(dot(x, w_ls));
        p_got.push_back(dot(x, w_got));
    }
    CHECK(metric_rmse(p_got, p_ls) < 1e-3);
}

TEST_CASE("train recovers a planted noiseless model") {
    SyntheticSpec spec;
    spec.world = WorldKind::BilinearPlanted;
    spec.d = 8;
    spec.factor_cards = {2, 2};
    spec.k_true = 3;
    spec.noise = 0.0;
    spec.instances_per_domain = 60;
    spec.seed = 42;
    const SynthResult world = synth_generate(spec);

    TrainConfig cfg;
    cfg.loss = LossKind::Squared;
    cfg.learning_rate = 0.05;
    cfg.epochs = 600;
    cfg.lr_decay_every = 150;
    cfg.k = 4;
    cfg.seed = 9;
    ModelStructure s;  // relu, learnable P
    const TwoSidedModel model = train(world.dataset, cfg, s);

    std::vector<double> preds, labels;
    for (const auto& inst : world.dataset.instances) {
        preds.push_back(model.forward(inst.features, world.dataset.z_of(inst)));
        labels.push_back(inst.target);
    }
    CHECK(metric_rmse(preds, labels) < 1e-2);
}

TEST_CASE("same config and seed give bit-identical models") {
    rng::Engine eng(34);
    const Dataset ds = planted_multidomain(3, 4, 10, 0.2, eng);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 17;
    cfg.k = 3;
    ModelStructure s;
    const TwoSidedModel a = train(ds, cfg, s);
    const TwoSidedModel b = train(ds, cfg, s);
    CHECK(a.p().data() == b.p().data());
    CHECK(a.q().data() == b.q().data());
}

TEST_CASE("objective is non-increasing over early epochs at a small rate") {
    rng::Engine eng(35);
    const Dataset ds = planted_multidomain(3, 5, 30, 0.1, eng);
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 5;
    cfg.k = 3;
    cfg.seed = 2;
    TrainTrace trace;
    ModelStructure s;
    train(ds, cfg, s, &trace);
    REQUIRE(trace.curve.size() == 5);
    for (std::size_t e = 1; e < trace.curve.size(); ++e)
        CHECK(trace.curve[e].second <= trace.curve[e - 1].second + 1e-6);
}

TEST_CASE("atomic one-hot decouples domains into independent problems") {
    // With Z = identity, linear activation and fixed identity P, the gradient
    // of domain i's data never touches row j != i of Q.
    rng::Engine eng(36);
    const Dataset ds = planted_multidomain(4, 3, 6, 0.0, eng);
    const auto m = TwoSidedModel::init(3, 4, 3, 0, identity_structure(3));
    for (const auto& inst : ds.instances) {
        const auto z = ds.z_of(inst);
        const auto g = m.backward(inst.features, z,
                                  loss_grad(LossKind::Squared,
                                            m.forward(inst.features, z), inst.target));
        for (std::size_t row = 0; row < 4; ++row) {
            if (row == inst.group) continue;
            for (std::size_t k = 0; k < 3; ++k) CHECK(g.dq(row, k) == 0.0);
        }
    }
}

TEST_CASE("l1 on Q: stronger lambda never increases the support") {
    rng::Engine eng(37);
    const Dataset ds = planted_multidomain(4, 6, 40, 0.05, eng);
    std::vector<std::size_t> support;
    for (const double lambda : {0.0, 0.05, 0.5}) {
        TrainConfig cfg;
        cfg.learning_rate = 0.05;
        cfg.epochs = 400;
        cfg.lr_decay_every = 80;
        cfg.k = 6;
        cfg.seed = 3;
        cfg.reg_q = {RegKind::L1, lambda, false};
        const TwoSidedModel m = train(ds, cfg, identity_structure(6));
        std::size_t nnz = 0;
        for (double v : m.q().data())
            if (std::abs(v) > 1e-3) ++nnz;
        support.push_back(nnz);
    }
    CHECK(support[1] <= support[0]);
    CHECK(support[2] <= support[1]);
}

TEST_CASE("masked and fixed parameters are never modified") {
    rng::Engine eng(38);
    const Dataset ds = planted_multidomain(3, 4, 10, 0.1, eng);
    Matrix mask(3, 4, 1.0);
    mask(0, 1) = mask(1, 2) = mask(2, 3) = 0.0;
    ModelStructure s = identity_structure(4);
    s.q_mask = mask;
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 4;
    const TwoSidedModel m = train(ds, cfg, s);
    CHECK(m.p().data() == Matrix::identity(4).data());
    CHECK(m.q()(0, 1) == 0.0);
    CHECK(m.q()(1, 2) == 0.0);
    CHECK(m.q()(2, 3) == 0.0);
}

TEST_CASE("divergence raises an error carrying the epoch") {
    rng::Engine eng(39);
    const Dataset ds = planted_multidomain(2, 3, 20, 0.0, eng);
    TrainConfig cfg;
    cfg.learning_rate = 1e6;  // hopeless step size on a bilinear objective
    cfg.epochs = 50;
    cfg.k = 3;
    cfg.seed = 1;
    ModelStructure s;
    s.activation = Activation::Linear;  // relu would just go dead and stall
    try {
        train(ds, cfg, s);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.epoch() < 50);
    }
}

TEST_CASE("train validates labels against the loss kind") {
    Dataset ds;
    ds.kind = TaskKind::Binary;
    ds.add_group("a", raw_descriptor({1.0}));
    ds.add_instance(0, {1.0}, 0.5);  // not a valid binary label
    TrainConfig cfg;
    cfg.loss = LossKind::Hinge;
    ModelStructure s;
    CHECK_THROWS_AS(train(ds, cfg, s), ValueError);

    Dataset reg;
    reg.kind = TaskKind::Regression;
    reg.add_group("a", raw_descriptor({1.0}));
    reg.add_instance(0, {1.0}, 1.0);
    cfg.loss = LossKind::Hinge;
    CHECK_THROWS_AS(train(reg, cfg, s), ValueError);
}

TEST_CASE("momentum accelerates without breaking determinism") {
    rng::Engine eng(40);
    const Dataset ds = planted_multidomain(2, 4, 25, 0.05, eng);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.momentum = 0.9;
    cfg.seed = 12;
    cfg.k = 4;
    ModelStructure s;
    TrainTrace t1, t2;
    train(ds, cfg, s, &t1);
    train(ds, cfg, s, &t2);
    CHECK(t1.final_objective == t2.final_objective);
    CHECK(std::isfinite(t1.final_objective));
}
