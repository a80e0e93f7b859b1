#include "tsnet/protocols.hpp"

#include <algorithm>
#include <set>

#include "tsnet/error.hpp"
#include "tsnet/tensor_completion.hpp"

namespace tsnet {

namespace {

const char* metric_name_for(TaskKind kind) {
    switch (kind) {
        case TaskKind::Regression: return "rmse";
        case TaskKind::Binary: return "error_rate";
        case TaskKind::Multiclass: return "accuracy";
    }
    return "?";
}

double scalar_metric(TaskKind kind, std::span<const double> preds,
                     std::span<const double> labels) {
    return kind == TaskKind::Binary ? metric_error_rate(preds, labels)
                                    : metric_rmse(preds, labels);
}

std::vector<std::vector<std::size_t>> test_ids_by_group(const Dataset& ds,
                                                        const Split& split) {
    std::vector<std::vector<std::size_t>> out(ds.groups.size());
    for (std::size_t id : split.test) out[ds.instances[id].group].push_back(id);
    return out;
}

// Per-group metric rows for a predictor given as effective weights per group.
std::vector<MetricRow> rows_from_weights(
    const Dataset& ds, const std::vector<std::vector<std::size_t>>& test_ids,
    const std::vector<std::vector<double>>& weights) {
    std::vector<MetricRow> rows;
    for (std::size_t g = 0; g < ds.groups.size(); ++g) {
        if (test_ids[g].empty()) continue;
        std::vector<double> preds, labels;
        preds.reserve(test_ids[g].size());
        for (std::size_t id : test_ids[g]) {
            preds.push_back(dot(ds.instances[id].features, weights[g]));
            labels.push_back(ds.instances[id].target);
        }
        rows.push_back({ds.groups[g].label, scalar_metric(ds.kind, preds, labels)});
    }
    return rows;
}

std::vector<MetricRow> rows_from_model(const Dataset& ds,
                                       const std::vector<std::vector<std::size_t>>& test_ids,
                                       const TwoSidedModel& model) {
    std::vector<std::vector<double>> weights(ds.groups.size());
    for (std::size_t g = 0; g < ds.groups.size(); ++g)
        if (!test_ids[g].empty())
            weights[g] = model.effective_weights(ds.groups[g].descriptor.encoded);
    return rows_from_weights(ds, test_ids, weights);
}

void require_multi_domain(const Dataset& ds, const char* setting) {
    if (ds.groups.size() < 2)
        throw ConfigError(std::string(setting) + ": needs at least 2 domains, got " +
                          std::to_string(ds.groups.size()));
}

// Pooled RMSE / error rate over every test record.
double pooled_metric(const Dataset& ds, const std::vector<std::size_t>& test_ids,
                     const TwoSidedModel& model) {
    std::vector<double> preds, labels;
    preds.reserve(test_ids.size());
    for (std::size_t id : test_ids) {
        const Instance& inst = ds.instances[id];
        preds.push_back(model.forward(inst.features, ds.z_of(inst)));
        labels.push_back(inst.target);
    }
    return scalar_metric(ds.kind, preds, labels);
}

}  // namespace

std::size_t argmax_class(const TwoSidedModel& model, std::span<const double> x,
                         const std::vector<Descriptor>& descriptors) {
    if (descriptors.empty()) throw ConfigError("argmax_class: no class descriptors");
    std::size_t best = 0;
    double best_score = model.forward(x, descriptors[0].encoded);
    for (std::size_t j = 1; j < descriptors.size(); ++j) {
        const double score = model.forward(x, descriptors[j].encoded);
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

ExperimentReport run_mdl(const Dataset& ds, const TrainConfig& cfg,
                         const ModelStructure& structure, const ProtocolOptions& opts) {
    require_multi_domain(ds, "mdl");
    const Split split =
        make_split(ds, opts.split_fraction, opts.split_seed, Stratify::PerDomain);

    TrainTrace trace;
    const Dataset train_ds = subset(ds, split.train);
    const TwoSidedModel model = train(train_ds, cfg, structure, &trace);

    ExperimentReport rep;
    rep.setting = "mdl";
    rep.seed = cfg.seed;
    rep.metric = metric_name_for(ds.kind);
    rep.domain_weighting = std::string(domain_weighting_name(cfg.domain_weighting));
    rep.rows = rows_from_model(ds, test_ids_by_group(ds, split), model);
    rep.aggregate = mean_of_rows(rep.rows);
    rep.curve = trace.curve;
    return rep;
}

namespace {

// Rank for the tensor-completion baseline by leave-one-held-in-domain-out
// validation on the training splits.
std::size_t validate_tc_rank(const Dataset& ds, const Split& split,
                             const std::vector<std::size_t>& grid,
                             const std::vector<std::vector<std::size_t>>& cell_of_group,
                             LossKind stl_loss, double lambda, std::size_t iters,
                             std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> train_ids(ds.groups.size());
    for (std::size_t id : split.train) train_ids[ds.instances[id].group].push_back(id);

    std::vector<std::vector<double>> group_weights(ds.groups.size());
    for (std::size_t g = 0; g < ds.groups.size(); ++g) {
        if (train_ids[g].empty()) continue;
        group_weights[g] = stl_fit(subset(ds, train_ids[g]), stl_loss, lambda, seed)[0];
    }

    std::size_t best_rank = 1;
    double best_err = -1.0;
    for (std::size_t rank = 1; rank <= 3; ++rank) {
        double err_sum = 0.0;
        std::size_t folds = 0;
        for (std::size_t v = 0; v < ds.groups.size(); ++v) {
            if (train_ids[v].empty()) continue;
            std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
            for (std::size_t g = 0; g < ds.groups.size(); ++g)
                if (g != v && !train_ids[g].empty())
                    models.emplace_back(cell_of_group[g], group_weights[g]);
            if (models.size() < 2) continue;
            const ModelTensor t = tensor_store(ds.feature_dim, grid, models);
            const CompletionResult res = tensor_complete(t, rank, iters, seed);
            const auto slice = res.tensor.slice(res.tensor.cell_index(cell_of_group[v]));
            std::vector<double> preds, labels;
            for (std::size_t id : train_ids[v]) {
                preds.push_back(dot(ds.instances[id].features, slice));
                labels.push_back(ds.instances[id].target);
            }
            err_sum += metric_rmse(preds, labels);
            ++folds;
        }
        if (folds == 0) break;
        const double err = err_sum / static_cast<double>(folds);
        if (best_err < 0.0 || err < best_err) {
            best_err = err;
            best_rank = rank;
        }
    }
    return best_rank;
}

}  // namespace

ExperimentReport run_zsda(const Dataset& ds, const DescriptorSchema& schema,
                          const TrainConfig& cfg, const ModelStructure& structure,
                          const ProtocolOptions& opts,
                          std::vector<std::vector<std::size_t>>* fold_access) {
    if (schema.mode() != EncodingMode::Distributed)
        throw ConfigError(
            "zsda: unsupported schema: one_hot_atomic leaves the held-out domain's "
            "descriptor row untrained; use a distributed encoding");
    require_multi_domain(ds, "zsda");

    const Split split =
        make_split(ds, opts.split_fraction, opts.split_seed, Stratify::PerDomain);
    const auto test_ids = test_ids_by_group(ds, split);

    std::vector<std::vector<std::size_t>> train_ids(ds.groups.size());
    for (std::size_t id : split.train) train_ids[ds.instances[id].group].push_back(id);

    if (fold_access) fold_access->assign(ds.groups.size(), {});

    // Grid cells for the tensor baseline come from the descriptor levels.
    std::vector<std::size_t> grid;
    for (const Factor& f : schema.factors()) grid.push_back(f.cardinality);
    std::vector<std::vector<std::size_t>> cell_of_group(ds.groups.size());
    for (std::size_t g = 0; g < ds.groups.size(); ++g)
        cell_of_group[g] = ds.groups[g].descriptor.levels;

    const LossKind stl_loss =
        ds.kind == TaskKind::Binary ? LossKind::Hinge : LossKind::Squared;

    std::size_t tc_rank = opts.tc_rank;
    if (opts.with_baselines && tc_rank == 0)
        tc_rank = validate_tc_rank(ds, split, grid, cell_of_group, stl_loss,
                                   opts.stl_lambda,
                                   std::min<std::size_t>(opts.tc_iters, 100), cfg.seed);

    const Dataset ds_aug = opts.with_baselines ? append_descriptor_features(ds) : Dataset{};

    std::vector<MetricRow> ours_rows, lr_rows, tc_rows;
    for (std::size_t held = 0; held < ds.groups.size(); ++held) {
        std::vector<std::size_t> fold_train;
        for (std::size_t id : split.train)
            if (ds.instances[id].group != held) fold_train.push_back(id);
        if (fold_train.empty() || test_ids[held].empty()) continue;

        const Dataset fold_ds = subset(ds, fold_train);
        TrainTrace trace;
        const TwoSidedModel model = train(fold_ds, cfg, structure, &trace);
        if (fold_access) {
            auto& counts = (*fold_access)[held];
            counts.assign(ds.groups.size(), 0);
            for (std::size_t g = 0; g < fold_ds.groups.size(); ++g)
                for (std::size_t orig = 0; orig < ds.groups.size(); ++orig)
                    if (ds.groups[orig].label == fold_ds.groups[g].label)
                        counts[orig] = trace.group_access_counts[g];
        }

        const auto w = model.effective_weights(ds.groups[held].descriptor.encoded);
        std::vector<double> preds, labels;
        for (std::size_t id : test_ids[held]) {
            preds.push_back(dot(ds.instances[id].features, w));
            labels.push_back(ds.instances[id].target);
        }
        ours_rows.push_back(
            {ds.groups[held].label, scalar_metric(ds.kind, preds, labels)});

        if (!opts.with_baselines) continue;

        // Blind transfer: one model on the pooled seen-domain data, with the
        // descriptor included as plain features for fairness.
        {
            const Dataset pool =
                pooled(subset(ds_aug, fold_train), raw_descriptor({1.0}));
            const auto w_lr = stl_fit(pool, stl_loss, opts.stl_lambda, cfg.seed)[0];
            std::vector<double> p2, l2;
            for (std::size_t id : test_ids[held]) {
                p2.push_back(dot(ds_aug.instances[id].features, w_lr));
                l2.push_back(ds_aug.instances[id].target);
            }
            lr_rows.push_back(
                {ds.groups[held].label, scalar_metric(ds.kind, p2, l2)});
        }

        // Tensor completion: per-domain models on the grid, held-out slice
        // recovered from the low-rank factorization.
        {
            std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> models;
            for (std::size_t g = 0; g < ds.groups.size(); ++g) {
                if (g == held || train_ids[g].empty()) continue;
                models.emplace_back(
                    cell_of_group[g],
                    stl_fit(subset(ds, train_ids[g]), stl_loss, opts.stl_lambda,
                            cfg.seed)[0]);
            }
            const ModelTensor t = tensor_store(ds.feature_dim, grid, models);
            const CompletionResult res = tensor_complete(t, tc_rank, opts.tc_iters,
                                                         cfg.seed);
            const auto slice =
                res.tensor.slice(res.tensor.cell_index(cell_of_group[held]));
            std::vector<double> p3, l3;
            for (std::size_t id : test_ids[held]) {
                p3.push_back(dot(ds.instances[id].features, slice));
                l3.push_back(ds.instances[id].target);
            }
            tc_rows.push_back(
                {ds.groups[held].label, scalar_metric(ds.kind, p3, l3)});
        }
    }

    ExperimentReport rep;
    rep.setting = "zsda";
    rep.seed = cfg.seed;
    rep.metric = metric_name_for(ds.kind);
    rep.domain_weighting = std::string(domain_weighting_name(cfg.domain_weighting));
    rep.rows = std::move(ours_rows);
    rep.aggregate = mean_of_rows(rep.rows);
    if (opts.with_baselines) {
        rep.comparisons.push_back({"LR", lr_rows, mean_of_rows(lr_rows)});
        rep.comparisons.push_back({"TC", tc_rows, mean_of_rows(tc_rows)});
    }
    return rep;
}

namespace {

// Expands a multiclass dataset into one-vs-rest (instance, class, +/-1)
// pairs over the given instances.
Dataset expand_one_vs_rest(const Dataset& ds, const std::vector<Descriptor>& descriptors,
                           const std::vector<std::size_t>& instance_ids) {
    Dataset out;
    out.kind = TaskKind::Binary;
    out.feature_dim = ds.feature_dim;
    for (std::size_t j = 0; j < descriptors.size(); ++j)
        out.add_group("class-" + std::to_string(j), descriptors[j]);
    for (std::size_t id : instance_ids) {
        const Instance& inst = ds.instances[id];
        for (std::size_t j = 0; j < descriptors.size(); ++j)
            out.add_instance(j, inst.features, inst.group == j ? 1.0 : -1.0);
    }
    return out;
}

std::vector<MetricRow> per_class_recall(const std::vector<std::size_t>& preds,
                                        const std::vector<std::size_t>& labels,
                                        const std::vector<std::string>& class_names) {
    std::vector<std::size_t> hits(class_names.size(), 0), totals(class_names.size(), 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        ++totals[labels[i]];
        if (preds[i] == labels[i]) ++hits[labels[i]];
    }
    std::vector<MetricRow> rows;
    for (std::size_t c = 0; c < class_names.size(); ++c)
        if (totals[c] > 0)
            rows.push_back({class_names[c], static_cast<double>(hits[c]) /
                                                static_cast<double>(totals[c])});
    return rows;
}

}  // namespace

ExperimentReport run_mtl_multiclass(const Dataset& ds,
                                    const std::vector<Descriptor>& class_descriptors,
                                    const TrainConfig& cfg,
                                    const ModelStructure& structure,
                                    const ProtocolOptions& opts) {
    if (ds.kind != TaskKind::Multiclass)
        throw ConfigError("mtl: dataset must be multiclass");
    require_multi_domain(ds, "mtl");
    if (class_descriptors.size() != ds.groups.size())
        throw ConfigError("mtl: " + std::to_string(class_descriptors.size()) +
                          " class descriptors for " + std::to_string(ds.groups.size()) +
                          " classes");

    const Split split =
        make_split(ds, opts.split_fraction, opts.split_seed, Stratify::PerClass);

    const Dataset expanded = expand_one_vs_rest(ds, class_descriptors, split.train);
    TrainConfig hinge_cfg = cfg;
    hinge_cfg.loss = LossKind::Hinge;
    TrainTrace trace;
    const TwoSidedModel model = train(expanded, hinge_cfg, structure, &trace);

    std::vector<std::size_t> preds, labels;
    for (std::size_t id : split.test) {
        preds.push_back(argmax_class(model, ds.instances[id].features, class_descriptors));
        labels.push_back(ds.instances[id].group);
    }
    if (preds.empty()) throw ValueError("mtl: empty test split");

    std::vector<std::string> names;
    for (const Group& g : ds.groups) names.push_back(g.label);

    ExperimentReport rep;
    rep.setting = "mtl";
    rep.seed = cfg.seed;
    rep.metric = "accuracy";
    rep.domain_weighting = std::string(domain_weighting_name(cfg.domain_weighting));
    rep.rows = per_class_recall(preds, labels, names);
    rep.aggregate = mean_of_rows(rep.rows);
    rep.curve = trace.curve;
    rep.comparisons.push_back(
        {"micro", {{"all", metric_multiclass_acc(preds, labels)}},
         metric_multiclass_acc(preds, labels)});
    return rep;
}

ExperimentReport run_zsl(const Dataset& train_ds,
                         const std::vector<Descriptor>& seen_descriptors,
                         const std::vector<std::vector<double>>& test_features,
                         const std::vector<std::size_t>& test_labels,
                         const std::vector<Descriptor>& novel_descriptors,
                         const TrainConfig& cfg, const ModelStructure& structure,
                         const ProtocolOptions& opts) {
    (void)opts;
    if (train_ds.kind != TaskKind::Multiclass)
        throw ConfigError("zsl: training dataset must be multiclass");
    if (seen_descriptors.size() != train_ds.groups.size())
        throw ConfigError("zsl: descriptor count does not match seen classes");
    if (novel_descriptors.empty()) throw ConfigError("zsl: no novel class descriptors");
    if (test_features.size() != test_labels.size())
        throw ShapeError("zsl: test features and labels differ in length");
    for (const Descriptor& novel : novel_descriptors)
        for (const Descriptor& seen : seen_descriptors)
            if (novel.encoded == seen.encoded)
                throw ConfigError(
                    "zsl: protocol violation: a novel descriptor matches a training "
                    "class prototype; label spaces must be disjoint");
    for (std::size_t label : test_labels)
        if (label >= novel_descriptors.size())
            throw ValueError("zsl: test label out of range of novel classes");

    std::vector<std::size_t> all_ids(train_ds.instances.size());
    for (std::size_t i = 0; i < all_ids.size(); ++i) all_ids[i] = i;
    const Dataset expanded = expand_one_vs_rest(train_ds, seen_descriptors, all_ids);
    TrainConfig hinge_cfg = cfg;
    hinge_cfg.loss = LossKind::Hinge;
    const TwoSidedModel model = train(expanded, hinge_cfg, structure);

    std::vector<std::size_t> preds;
    preds.reserve(test_features.size());
    for (const auto& x : test_features)
        preds.push_back(argmax_class(model, x, novel_descriptors));
    if (preds.empty()) throw ValueError("zsl: empty test set");

    std::vector<std::string> names;
    for (std::size_t c = 0; c < novel_descriptors.size(); ++c)
        names.push_back("novel-" + std::to_string(c));

    ExperimentReport rep;
    rep.setting = "zsl";
    rep.seed = cfg.seed;
    rep.metric = "accuracy";
    rep.domain_weighting = std::string(domain_weighting_name(cfg.domain_weighting));
    rep.rows = per_class_recall(preds, test_labels, names);
    rep.aggregate = mean_of_rows(rep.rows);
    rep.comparisons.push_back(
        {"micro", {{"all", metric_multiclass_acc(preds, test_labels)}},
         metric_multiclass_acc(preds, test_labels)});
    return rep;
}

ExperimentReport run_mdmt(const Dataset& ds, const TrainConfig& cfg,
                          const ModelStructure& structure, const ProtocolOptions& opts) {
    require_multi_domain(ds, "mdmt");
    const Split split =
        make_split(ds, opts.split_fraction, opts.split_seed, Stratify::PerDomain);
    const auto test_ids = test_ids_by_group(ds, split);

    TrainTrace trace;
    const TwoSidedModel model = train(subset(ds, split.train), cfg, structure, &trace);

    ExperimentReport rep;
    rep.setting = "mdmt";
    rep.seed = cfg.seed;
    rep.metric = metric_name_for(ds.kind);
    rep.domain_weighting = std::string(domain_weighting_name(cfg.domain_weighting));
    rep.rows = rows_from_model(ds, test_ids, model);
    rep.aggregate = mean_of_rows(rep.rows);
    rep.curve = trace.curve;

    const double pooled_val = pooled_metric(ds, split.test, model);
    rep.comparisons.push_back({"pooled", {{"all", pooled_val}}, pooled_val});

    // The conventional reading of the same data: every (domain, task) cell
    // becomes an atomic task with a 1-of-N descriptor.
    Dataset atomic = ds;
    atomize_descriptors(atomic, false);
    const TwoSidedModel atomic_model = train(subset(atomic, split.train), cfg, structure);
    auto atomic_rows = rows_from_model(atomic, test_ids, atomic_model);
    rep.comparisons.push_back(
        {"one_hot_atomic", atomic_rows, mean_of_rows(atomic_rows)});
    return rep;
}

}  // namespace tsnet
