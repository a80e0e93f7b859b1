#include "tsnet/optim.hpp"

#include <cmath>
#include <numeric>

#include "tsnet/error.hpp"
#include "tsnet/rng.hpp"

namespace tsnet {

std::string_view reg_kind_name(RegKind kind) {
    switch (kind) {
        case RegKind::None: return "none";
        case RegKind::Frobenius: return "frobenius";
        case RegKind::L1: return "l1";
        case RegKind::L21: return "l21";
    }
    return "?";
}

RegKind reg_kind_from_name(std::string_view name) {
    if (name == "none") return RegKind::None;
    if (name == "frobenius") return RegKind::Frobenius;
    if (name == "l1") return RegKind::L1;
    if (name == "l21") return RegKind::L21;
    throw ValueError("unknown regularizer kind '" + std::string(name) + "'");
}

std::string_view domain_weighting_name(DomainWeighting w) {
    return w == DomainWeighting::PerDomainMean ? "per_domain_mean" : "per_instance_mean";
}

DomainWeighting domain_weighting_from_name(std::string_view name) {
    if (name == "per_domain_mean") return DomainWeighting::PerDomainMean;
    if (name == "per_instance_mean") return DomainWeighting::PerInstanceMean;
    throw ValueError("unknown domain weighting '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (momentum < 0.0 || momentum >= 1.0)
        throw ConfigError("train: momentum must be in [0, 1)");
    if (reg_p.strength < 0.0 || reg_q.strength < 0.0)
        throw ConfigError("train: regularizer strength must be >= 0");
    if (lr_decay <= 0.0 || lr_decay > 1.0)
        throw ConfigError("train: lr_decay must be in (0, 1]");
}

namespace {

double base_norm(RegKind kind, const Matrix& w) {
    switch (kind) {
        case RegKind::None: return 0.0;
        case RegKind::Frobenius: return norm_fro(w);
        case RegKind::L1: return norm_l1(w);
        case RegKind::L21: return norm_l21(w);
    }
    return 0.0;
}

Matrix base_subgrad(RegKind kind, const Matrix& w) {
    Matrix g(w.rows(), w.cols());
    switch (kind) {
        case RegKind::None:
            break;
        case RegKind::Frobenius: {
            const double n = norm_fro(w);
            if (n > 0.0) {
                g = w;
                scale(g, 1.0 / n);
            }
            break;
        }
        case RegKind::L1:
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double v = w.data()[i];
                g.data()[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
            }
            break;
        case RegKind::L21:
            for (std::size_t i = 0; i < w.rows(); ++i) {
                double sq = 0.0;
                for (std::size_t j = 0; j < w.cols(); ++j) sq += w(i, j) * w(i, j);
                if (sq == 0.0) continue;
                const double inv = 1.0 / std::sqrt(sq);
                for (std::size_t j = 0; j < w.cols(); ++j) g(i, j) = w(i, j) * inv;
            }
            break;
    }
    return g;
}

void check_labels(LossKind loss, const Dataset& ds) {
    if (loss == LossKind::Hinge) {
        if (ds.kind != TaskKind::Binary)
            throw ValueError("train: hinge loss requires binary labels in {-1, +1}");
        for (const Instance& inst : ds.instances)
            if (inst.target != 1.0 && inst.target != -1.0)
                throw ValueError("train: hinge label must be -1 or +1, got " +
                                 std::to_string(inst.target));
    } else if (ds.kind != TaskKind::Regression) {
        throw ValueError("train: squared loss requires regression labels");
    }
}

void check_groups_nonempty(const Dataset& ds) {
    for (const Group& g : ds.groups)
        if (g.members.empty())
            throw ValueError("degenerate domain '" + g.label + "': no instances");
}

// Instance weight making the uniform-shuffled batch mean an unbiased
// estimate of the configured objective.
std::vector<double> instance_scales(const Dataset& ds, DomainWeighting weighting) {
    std::vector<double> s(ds.groups.size(), 1.0);
    if (weighting == DomainWeighting::PerDomainMean) {
        const double n = static_cast<double>(ds.instances.size());
        const double m = static_cast<double>(ds.groups.size());
        for (std::size_t g = 0; g < ds.groups.size(); ++g)
            s[g] = n / (m * static_cast<double>(ds.groups[g].members.size()));
    }
    return s;
}

}  // namespace

double reg_norm(const RegSpec& spec, const Matrix& w) {
    if (spec.kind == RegKind::None) return 0.0;
    if (spec.on_transpose) return base_norm(spec.kind, transpose(w));
    return base_norm(spec.kind, w);
}

Matrix reg_subgrad(const RegSpec& spec, const Matrix& w) {
    if (spec.kind == RegKind::None) return Matrix(w.rows(), w.cols());
    if (spec.on_transpose) return transpose(base_subgrad(spec.kind, transpose(w)));
    return base_subgrad(spec.kind, w);
}

double objective(const TwoSidedModel& model, const Dataset& ds, const TrainConfig& cfg) {
    if (ds.instances.empty()) throw ValueError("objective: empty dataset");
    check_groups_nonempty(ds);

    WorkBuffers wb;
    double data_term = 0.0;
    if (cfg.domain_weighting == DomainWeighting::PerDomainMean) {
        for (const Group& g : ds.groups) {
            double domain_sum = 0.0;
            for (std::size_t id : g.members) {
                const Instance& inst = ds.instances[id];
                const double yhat = model.forward_into(inst.features, ds.z_of(inst), wb);
                domain_sum += loss(cfg.loss, yhat, inst.target);
            }
            data_term += domain_sum / static_cast<double>(g.members.size());
        }
        data_term /= static_cast<double>(ds.groups.size());
    } else {
        for (const Instance& inst : ds.instances) {
            const double yhat = model.forward_into(inst.features, ds.z_of(inst), wb);
            data_term += loss(cfg.loss, yhat, inst.target);
        }
        data_term /= static_cast<double>(ds.instances.size());
    }
    return data_term + cfg.reg_p.strength * reg_norm(cfg.reg_p, model.p()) +
           cfg.reg_q.strength * reg_norm(cfg.reg_q, model.q());
}

TwoSidedModel train(const Dataset& ds, const TrainConfig& cfg,
                    const ModelStructure& structure, TrainTrace* trace) {
    cfg.validate();
    ds.validate();
    if (ds.instances.empty()) throw ValueError("train: empty dataset");
    if (ds.descriptor_dim() == 0) throw ValueError("train: dataset has no descriptors");
    check_groups_nonempty(ds);
    check_labels(cfg.loss, ds);

    const std::size_t d = ds.feature_dim;
    const std::size_t b = ds.descriptor_dim();
    std::size_t k = cfg.k;
    if (structure.p_fixed) {
        if (k != 0 && k != structure.fixed_p.cols())
            throw ShapeError("train: K=" + std::to_string(k) +
                             " conflicts with fixed P of width " +
                             std::to_string(structure.fixed_p.cols()));
        k = structure.fixed_p.cols();
    } else if (structure.q_mask) {
        if (k != 0 && k != structure.q_mask->cols())
            throw ShapeError("train: K conflicts with Q mask width");
        k = structure.q_mask->cols();
    }
    if (k == 0) k = hidden_width(d);

    TwoSidedModel model = TwoSidedModel::init(d, b, k, cfg.seed, structure);

    const std::vector<double> scales = instance_scales(ds, cfg.domain_weighting);
    if (trace) {
        trace->curve.clear();
        trace->group_access_counts.assign(ds.groups.size(), 0);
    }

    rng::Engine shuffler(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(ds.instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    GradientPair acc{Matrix(d, k), Matrix(b, k)};
    Matrix vel_p(d, k);
    Matrix vel_q(b, k);
    WorkBuffers wb;

    double last_objective = 0.0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = cfg.learning_rate;
        if (cfg.lr_decay_every > 0 && cfg.lr_decay < 1.0)
            lr *= std::pow(cfg.lr_decay, static_cast<double>(epoch / cfg.lr_decay_every));

        rng::shuffle(order, shuffler);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            acc.dp.data().assign(acc.dp.size(), 0.0);
            acc.dq.data().assign(acc.dq.size(), 0.0);

            for (std::size_t pos = start; pos < stop; ++pos) {
                const Instance& inst = ds.instances[order[pos]];
                const auto z = ds.z_of(inst);
                const double yhat = model.forward_into(inst.features, z, wb);
                const double upstream =
                    scales[inst.group] * loss_grad(cfg.loss, yhat, inst.target);
                if (upstream != 0.0)
                    model.accumulate_gradient(wb, inst.features, z, upstream, acc);
                if (trace) ++trace->group_access_counts[inst.group];
            }

            const double inv = 1.0 / static_cast<double>(stop - start);
            if (!structure.p_fixed) {
                scale(acc.dp, inv);
                if (cfg.reg_p.kind != RegKind::None && cfg.reg_p.strength > 0.0)
                    axpy(cfg.reg_p.strength, reg_subgrad(cfg.reg_p, model.p()), acc.dp);
            }
            scale(acc.dq, inv);
            if (cfg.reg_q.kind != RegKind::None && cfg.reg_q.strength > 0.0)
                axpy(cfg.reg_q.strength, reg_subgrad(cfg.reg_q, model.q()), acc.dq);
            if (structure.q_mask) apply_mask(acc.dq, *structure.q_mask);

            if (!structure.p_fixed) {
                scale(vel_p, cfg.momentum);
                axpy(-lr, acc.dp, vel_p);
            }
            scale(vel_q, cfg.momentum);
            axpy(-lr, acc.dq, vel_q);
            model.step(vel_p, vel_q);
        }

        last_objective = objective(model, ds, cfg);
        if (!std::isfinite(last_objective))
            throw DivergenceError(epoch, "train: objective diverged at epoch " +
                                             std::to_string(epoch));
        if (trace) trace->curve.emplace_back(epoch, last_objective);
    }

    if (trace) trace->final_objective = last_objective;
    return model;
}

}  // namespace tsnet
