#include "tsnet/baselines.hpp"

#include <cmath>

#include "tsnet/error.hpp"

namespace tsnet {

std::string_view baseline_name(BaselineName name) {
    switch (name) {
        case BaselineName::STL: return "STL";
        case BaselineName::RMTL: return "RMTL";
        case BaselineName::FEDA: return "FEDA";
        case BaselineName::MTFL: return "MTFL";
        case BaselineName::GOMTL: return "GOMTL";
    }
    return "?";
}

BaselineName baseline_from_name(std::string_view name) {
    if (name == "STL" || name == "stl") return BaselineName::STL;
    if (name == "RMTL" || name == "rmtl") return BaselineName::RMTL;
    if (name == "FEDA" || name == "feda") return BaselineName::FEDA;
    if (name == "MTFL" || name == "mtfl") return BaselineName::MTFL;
    if (name == "GOMTL" || name == "gomtl" || name == "GO-MTL")
        return BaselineName::GOMTL;
    throw ValueError("unknown baseline '" + std::string(name) + "'");
}

namespace {

// P = a (x) b with a an (M+1)-vector of ones and b = I_D: the feature vector
// replicated into M+1 blocks of width D.
Matrix feda_p(std::size_t domains, std::size_t d) {
    Matrix p(d, (domains + 1) * d);
    for (std::size_t copy = 0; copy <= domains; ++copy)
        for (std::size_t i = 0; i < d; ++i) p(i, copy * d + i) = 1.0;
    return p;
}

// Q' keeps the shared w_0 block (first block, driven by the bias bit) and
// one per-domain block; everything else is pinned to zero.
Matrix feda_mask(std::size_t domains, std::size_t d) {
    Matrix mask(domains + 1, (domains + 1) * d);
    for (std::size_t dom = 0; dom < domains; ++dom) {
        const std::size_t block = dom + 1;
        for (std::size_t i = 0; i < d; ++i) mask(dom, block * d + i) = 1.0;
    }
    for (std::size_t i = 0; i < d; ++i) mask(domains, i) = 1.0;
    return mask;
}

}  // namespace

BaselineSpec make_baseline(BaselineName name, std::size_t domains,
                           std::size_t feature_dim, double reg_strength) {
    if (domains == 0) throw ValueError("make_baseline: no domains");
    if (feature_dim == 0) throw ValueError("make_baseline: feature_dim must be >= 1");

    BaselineSpec spec;
    spec.name = name;
    spec.structure.activation = Activation::Linear;

    switch (name) {
        case BaselineName::STL:
            spec.structure.p_fixed = true;
            spec.structure.fixed_p = Matrix::identity(feature_dim);
            spec.k = feature_dim;
            break;
        case BaselineName::RMTL:
            spec.shared_bias = true;
            spec.structure.p_fixed = true;
            spec.structure.fixed_p = Matrix::identity(feature_dim);
            spec.k = feature_dim;
            break;
        case BaselineName::FEDA:
            spec.shared_bias = true;
            spec.structure.p_fixed = true;
            spec.structure.fixed_p = feda_p(domains, feature_dim);
            spec.structure.q_mask = feda_mask(domains, feature_dim);
            spec.k = (domains + 1) * feature_dim;
            break;
        case BaselineName::MTFL:
            spec.structure.p_fixed = true;
            spec.structure.fixed_p = Matrix::identity(feature_dim);
            spec.k = feature_dim;
            // Row-wise (2,1)-norm on Q' = feature-wise grouping across tasks.
            spec.reg_q = {RegKind::L21, reg_strength, true};
            break;
        case BaselineName::GOMTL:
            spec.k = hidden_width(feature_dim);
            spec.reg_p = {RegKind::Frobenius, reg_strength, false};
            spec.reg_q = {RegKind::L1, reg_strength, false};
            break;
    }
    return spec;
}

std::vector<double> ridge_fit(const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys, double lambda) {
    if (xs.empty() || xs.size() != ys.size())
        throw ValueError("ridge_fit: empty or mismatched design");
    const std::size_t d = xs.front().size();

    // Normal equations A w = c with A = X'X + lambda I, c = X'y.
    Matrix a(d, d);
    std::vector<double> c(d, 0.0);
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const auto& x = xs[n];
        if (x.size() != d) throw ShapeError("ridge_fit: ragged design matrix");
        for (std::size_t i = 0; i < d; ++i) {
            if (x[i] == 0.0) continue;
            c[i] += x[i] * ys[n];
            for (std::size_t j = 0; j < d; ++j) a(i, j) += x[i] * x[j];
        }
    }
    for (std::size_t i = 0; i < d; ++i) a(i, i) += lambda;

    // Gaussian elimination with partial pivoting.
    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = i;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) < 1e-12)
            throw SingularError(
                "ridge_fit: singular normal equations; set lambda > 0 to regularize");
        if (pivot != col) {
            for (std::size_t j = 0; j < d; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(c[col], c[pivot]);
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < d; ++r) {
            const double f = a(r, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < d; ++j) a(r, j) -= f * a(col, j);
            c[r] -= f * c[col];
        }
    }
    std::vector<double> w(d, 0.0);
    for (std::size_t col = d; col-- > 0;) {
        double acc = c[col];
        for (std::size_t j = col + 1; j < d; ++j) acc -= a(col, j) * w[j];
        w[col] = acc / a(col, col);
    }
    return w;
}

namespace {

std::vector<double> hinge_fit(const Dataset& ds, const Group& group, double lambda,
                              std::uint64_t seed) {
    // One-domain two-sided model with P = identity and z = [1]: Q's single
    // row is the weight vector.
    Dataset sub;
    sub.kind = TaskKind::Binary;
    sub.feature_dim = ds.feature_dim;
    sub.add_group(group.label, raw_descriptor({1.0}));
    for (std::size_t id : group.members)
        sub.add_instance(0, ds.instances[id].features, ds.instances[id].target);

    TrainConfig cfg;
    cfg.loss = LossKind::Hinge;
    cfg.learning_rate = 0.05;
    cfg.epochs = 300;
    cfg.lr_decay_every = 100;
    cfg.seed = seed;
    cfg.reg_q = {RegKind::Frobenius, lambda, false};

    ModelStructure structure;
    structure.activation = Activation::Linear;
    structure.p_fixed = true;
    structure.fixed_p = Matrix::identity(ds.feature_dim);

    const TwoSidedModel model = train(sub, cfg, structure);
    const double one[1] = {1.0};
    return model.effective_weights(one);
}

}  // namespace

std::vector<std::vector<double>> stl_fit(const Dataset& ds, LossKind loss, double lambda,
                                         std::uint64_t seed) {
    if (ds.instances.empty()) throw ValueError("stl_fit: empty dataset");
    std::vector<std::vector<double>> weights;
    weights.reserve(ds.groups.size());
    for (const Group& g : ds.groups) {
        if (g.members.empty())
            throw ValueError("degenerate domain '" + g.label + "': no instances");
        if (loss == LossKind::Squared) {
            std::vector<std::vector<double>> xs;
            std::vector<double> ys;
            xs.reserve(g.members.size());
            ys.reserve(g.members.size());
            for (std::size_t id : g.members) {
                xs.push_back(ds.instances[id].features);
                ys.push_back(ds.instances[id].target);
            }
            weights.push_back(ridge_fit(xs, ys, lambda));
        } else {
            weights.push_back(hinge_fit(ds, g, lambda, seed));
        }
    }
    return weights;
}

}  // namespace tsnet
