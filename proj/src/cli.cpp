#include "tsnet/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tsnet/baselines.hpp"
#include "tsnet/config.hpp"
#include "tsnet/error.hpp"
#include "tsnet/loaders.hpp"
#include "tsnet/protocols.hpp"
#include "tsnet/report.hpp"
#include "tsnet/synth.hpp"

namespace tsnet::cli {

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string model_path;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App* sub, CommonArgs& args, bool config_required = true) {
    auto* opt = sub->add_option("--config", args.config_path, "configuration file");
    if (config_required) opt->required();
    sub->add_option("--out", args.out_path, "output path (report, dataset, ...)");
    sub->add_option("--model", args.model_path, "model checkpoint path");
    sub->add_option("--seed", args.seed, "override config seeds");
    sub->add_flag("--quiet", args.quiet, "suppress progress output");
}

RegSpec parse_reg(const std::string& text) {
    const auto parts = split_list(text, ':');
    if (parts.empty() || parts.size() > 2)
        throw ConfigError("config: bad regularizer '" + text + "', expected kind[:strength]");
    RegSpec spec;
    spec.kind = reg_kind_from_name(parts[0]);
    if (parts.size() == 2) {
        std::istringstream ss(parts[1]);
        if (!(ss >> spec.strength) || !ss.eof())
            throw ConfigError("config: bad regularizer strength in '" + text + "'");
    }
    return spec;
}

TrainConfig train_config_from(const Config& cfg, const CommonArgs& args) {
    TrainConfig tc;
    tc.learning_rate = cfg.get_double_or("train", "learning_rate", tc.learning_rate);
    tc.epochs = cfg.get_count_or("train", "epochs", tc.epochs);
    tc.batch_size = cfg.get_count_or("train", "batch_size", tc.batch_size);
    tc.seed = cfg.get_seed_or("train", "seed", tc.seed);
    tc.loss = loss_from_name(cfg.get_or("train", "loss", "squared"));
    const std::string k = cfg.get_or("train", "k", "auto");
    if (k != "auto") tc.k = cfg.get_count("train", "k");
    tc.reg_p = parse_reg(cfg.get_or("train", "reg_p", "none"));
    tc.reg_q = parse_reg(cfg.get_or("train", "reg_q", "none"));
    tc.domain_weighting = domain_weighting_from_name(
        cfg.get_or("train", "domain_weighting", "per_domain_mean"));
    tc.momentum = cfg.get_double_or("train", "momentum", tc.momentum);
    tc.lr_decay = cfg.get_double_or("train", "lr_decay", tc.lr_decay);
    tc.lr_decay_every = cfg.get_count_or("train", "lr_decay_every", tc.lr_decay_every);
    if (args.seed) tc.seed = *args.seed;
    return tc;
}

ModelStructure structure_from(const Config& cfg) {
    ModelStructure s;
    s.activation = activation_from_name(cfg.get_or("train", "activation", "relu"));
    return s;
}

DescriptorSchema schema_from(const Config& cfg) {
    if (!cfg.has_section("schema"))
        throw ConfigError("config: csv datasets need a [schema] section");
    std::vector<Factor> factors;
    for (const auto& item : split_list(cfg.get("schema", "factors"))) {
        const auto parts = split_list(item, ':');
        if (parts.size() != 2)
            throw ConfigError("config: bad factor '" + item + "', expected name:cardinality");
        std::size_t card = 0;
        std::istringstream ss(parts[1]);
        if (!(ss >> card) || !ss.eof())
            throw ConfigError("config: bad cardinality in factor '" + item + "'");
        factors.push_back({parts[0], card});
    }
    return DescriptorSchema(factors,
                            encoding_mode_from_name(
                                cfg.get_or("schema", "mode", "distributed")),
                            cfg.get_bool_or("schema", "shared_bias", false));
}

SyntheticSpec synth_spec_from(const Config& cfg, const CommonArgs& args) {
    SyntheticSpec spec;
    spec.world = world_kind_from_name(cfg.get_or("synthetic", "world", "bilinear_planted"));
    spec.d = cfg.get_count_or("synthetic", "d", spec.d);
    if (cfg.has("synthetic", "factors")) {
        spec.factor_cards.clear();
        for (const auto& item : split_list(cfg.get("synthetic", "factors"))) {
            std::size_t card = 0;
            std::istringstream ss(item);
            if (!(ss >> card) || !ss.eof())
                throw ConfigError("config: bad factor cardinality '" + item + "'");
            spec.factor_cards.push_back(card);
        }
    }
    spec.k_true = cfg.get_count_or("synthetic", "k_true", spec.k_true);
    spec.noise = cfg.get_double_or("synthetic", "noise", spec.noise);
    spec.instances_per_domain =
        cfg.get_count_or("synthetic", "instances_per_domain", spec.instances_per_domain);
    spec.seed = cfg.get_seed_or("synthetic", "seed", spec.seed);
    spec.tasks = cfg.get_count_or("synthetic", "tasks", spec.tasks);
    spec.classes = cfg.get_count_or("synthetic", "classes", spec.classes);
    spec.attr_dim = cfg.get_count_or("synthetic", "attr_dim", spec.attr_dim);
    if (args.seed) spec.seed = *args.seed;
    return spec;
}

LoadedData load_data(const Config& cfg, const CommonArgs& args) {
    const std::string source = cfg.get_or("dataset", "source", "csv");
    const double fraction = cfg.get_double_or("dataset", "split_fraction", 0.5);
    std::uint64_t split_seed = cfg.get_seed_or("dataset", "split_seed", 0);
    if (args.seed) split_seed = *args.seed;
    const bool standardize = cfg.get_bool_or("dataset", "standardize", false);
    const bool bias = cfg.get_bool_or("dataset", "append_bias_feature", false);

    if (source == "school") {
        return load_school(cfg.get("dataset", "path"),
                           cfg.get_count_or("dataset", "min_students_per_year", 50),
                           fraction, split_seed, standardize, bias,
                           cfg.get_bool_or("schema", "shared_bias", false));
    }
    if (source == "restaurant") {
        return load_restaurant(cfg.get("dataset", "path"), fraction, split_seed,
                               standardize, bias);
    }
    if (source == "synthetic") {
        SynthResult synth = synth_generate(synth_spec_from(cfg, args));
        LoadedData data;
        data.dataset = std::move(synth.dataset);
        data.schema = synth.schema;
        data.split = make_split(data.dataset, fraction, split_seed, Stratify::PerDomain);
        return data;
    }
    if (source == "csv") {
        DatasetConfig dc;
        dc.path = cfg.get("dataset", "path");
        const std::string delim = cfg.get_or("dataset", "delimiter", ",");
        if (delim.size() != 1) throw ConfigError("config: delimiter must be one character");
        dc.delimiter = delim[0];
        dc.kind = task_kind_from_name(cfg.get_or("dataset", "kind", "regression"));
        dc.label_column = cfg.get("dataset", "label");
        if (cfg.has("dataset", "features"))
            dc.feature_columns = split_list(cfg.get("dataset", "features"));
        dc.factor_columns = split_list(cfg.get("dataset", "factors"));
        dc.schema = schema_from(cfg);
        dc.standardize = standardize;
        dc.append_bias_feature = bias;
        dc.split_fraction = fraction;
        dc.split_seed = split_seed;
        return load_csv(dc);
    }
    throw ConfigError("config: unknown dataset source '" + source + "'");
}

ProtocolOptions protocol_options_from(const Config& cfg, const CommonArgs& args) {
    ProtocolOptions opts;
    opts.split_fraction = cfg.get_double_or("dataset", "split_fraction", 0.5);
    opts.split_seed = cfg.get_seed_or("dataset", "split_seed", 0);
    if (args.seed) opts.split_seed = *args.seed;
    opts.stl_lambda = cfg.get_double_or("protocol", "stl_lambda", opts.stl_lambda);
    if (cfg.get_or("protocol", "tc_rank", "auto") != "auto")
        opts.tc_rank = cfg.get_count("protocol", "tc_rank");
    opts.tc_iters = cfg.get_count_or("protocol", "tc_iters", opts.tc_iters);
    opts.with_baselines = cfg.get_bool_or("protocol", "with_baselines", true);
    return opts;
}

void emit_report(ExperimentReport rep, const Config& cfg, const CommonArgs& args) {
    rep.config_hash = cfg.hash();
    if (!args.out_path.empty()) {
        write_report_file(rep, args.out_path);
        if (!args.quiet)
            std::cout << rep.setting << ": aggregate " << rep.metric << " = "
                      << format_double(rep.aggregate) << " -> " << args.out_path << '\n';
    } else {
        write_report(rep, std::cout);
    }
}

std::vector<Descriptor> class_descriptors_from(const Config& cfg, const Dataset& ds) {
    const std::string spec = cfg.get_or("protocol", "class_descriptors", "onehot");
    if (spec == "onehot") {
        DescriptorSchema schema({{"class", ds.groups.size()}}, EncodingMode::OneHotAtomic,
                                false);
        std::vector<Descriptor> out;
        for (std::size_t c = 0; c < ds.groups.size(); ++c) {
            const std::size_t levels[1] = {c};
            out.push_back(encode(schema, levels));
        }
        return out;
    }
    if (spec == "group") {
        // Use the descriptors already attached to the dataset groups.
        std::vector<Descriptor> out;
        for (const Group& g : ds.groups) out.push_back(g.descriptor);
        return out;
    }
    return load_descriptor_rows(spec);
}

int cmd_mdl(const CommonArgs& args) {
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    emit_report(run_mdl(data.dataset, train_config_from(cfg, args), structure_from(cfg),
                        protocol_options_from(cfg, args)),
                cfg, args);
    return 0;
}

int cmd_zsda(const CommonArgs& args) {
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    emit_report(run_zsda(data.dataset, data.schema, train_config_from(cfg, args),
                         structure_from(cfg), protocol_options_from(cfg, args)),
                cfg, args);
    return 0;
}

int cmd_mdmt(const CommonArgs& args) {
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    emit_report(run_mdmt(data.dataset, train_config_from(cfg, args), structure_from(cfg),
                         protocol_options_from(cfg, args)),
                cfg, args);
    return 0;
}

int cmd_mtl(const CommonArgs& args) {
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    const auto descriptors = class_descriptors_from(cfg, data.dataset);
    emit_report(run_mtl_multiclass(data.dataset, descriptors,
                                   train_config_from(cfg, args), structure_from(cfg),
                                   protocol_options_from(cfg, args)),
                cfg, args);
    return 0;
}

int cmd_zsl(const CommonArgs& args) {
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    const Dataset& ds = data.dataset;
    const auto descriptors = class_descriptors_from(cfg, ds);

    if (!cfg.has("protocol", "novel_classes"))
        throw ConfigError("config: zsl needs [protocol] novel_classes = i,j,...");
    std::vector<std::size_t> novel_ids;
    for (const auto& item : split_list(cfg.get("protocol", "novel_classes"))) {
        std::size_t id = 0;
        std::istringstream ss(item);
        if (!(ss >> id) || !ss.eof() || id >= ds.groups.size())
            throw ConfigError("config: bad novel class id '" + item + "'");
        novel_ids.push_back(id);
    }

    // Seen classes keep their data; novel classes become the test set.
    std::vector<bool> is_novel(ds.groups.size(), false);
    for (std::size_t id : novel_ids) is_novel[id] = true;

    Dataset seen_ds;
    seen_ds.kind = TaskKind::Multiclass;
    seen_ds.feature_dim = ds.feature_dim;
    std::vector<Descriptor> seen_desc, novel_desc;
    std::vector<std::size_t> novel_rank(ds.groups.size(), 0);
    for (std::size_t g = 0; g < ds.groups.size(); ++g) {
        if (is_novel[g]) {
            novel_rank[g] = novel_desc.size();
            novel_desc.push_back(descriptors[g]);
        } else {
            seen_desc.push_back(descriptors[g]);
            seen_ds.add_group(ds.groups[g].label, ds.groups[g].descriptor);
        }
    }
    std::vector<std::size_t> seen_index(ds.groups.size(), 0);
    for (std::size_t g = 0, next = 0; g < ds.groups.size(); ++g)
        if (!is_novel[g]) seen_index[g] = next++;

    std::vector<std::vector<double>> test_x;
    std::vector<std::size_t> test_y;
    for (const Instance& inst : ds.instances) {
        if (is_novel[inst.group]) {
            test_x.push_back(inst.features);
            test_y.push_back(novel_rank[inst.group]);
        } else {
            seen_ds.add_instance(seen_index[inst.group], inst.features, inst.target);
        }
    }

    emit_report(run_zsl(seen_ds, seen_desc, test_x, test_y, novel_desc,
                        train_config_from(cfg, args), structure_from(cfg),
                        protocol_options_from(cfg, args)),
                cfg, args);
    return 0;
}

int cmd_train(const CommonArgs& args) {
    if (args.model_path.empty())
        throw ConfigError("train: --model <checkpoint path> is required");
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    const Dataset train_ds = subset(data.dataset, data.split.train);
    TrainTrace trace;
    const TwoSidedModel model =
        train(train_ds, train_config_from(cfg, args), structure_from(cfg), &trace);
    model.save_file(args.model_path);
    if (!args.quiet)
        std::cout << "trained: final objective = " << format_double(trace.final_objective)
                  << " -> " << args.model_path << '\n';
    return 0;
}

int cmd_eval(const CommonArgs& args) {
    if (args.model_path.empty())
        throw ConfigError("eval: --model <checkpoint path> is required");
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    const TwoSidedModel model = TwoSidedModel::load_file(args.model_path);

    const Dataset& ds = data.dataset;
    ExperimentReport rep;
    rep.setting = "eval";
    rep.seed = data.split.seed;
    rep.metric = ds.kind == TaskKind::Binary ? "error_rate" : "rmse";
    rep.domain_weighting = "n/a";

    std::vector<std::vector<std::size_t>> by_group(ds.groups.size());
    for (std::size_t id : data.split.test) by_group[ds.instances[id].group].push_back(id);
    for (std::size_t g = 0; g < ds.groups.size(); ++g) {
        if (by_group[g].empty()) continue;
        std::vector<double> preds, labels;
        for (std::size_t id : by_group[g]) {
            preds.push_back(
                model.forward(ds.instances[id].features, ds.z_of(ds.instances[id])));
            labels.push_back(ds.instances[id].target);
        }
        rep.rows.push_back({ds.groups[g].label,
                            ds.kind == TaskKind::Binary
                                ? metric_error_rate(preds, labels)
                                : metric_rmse(preds, labels)});
    }
    rep.aggregate = mean_of_rows(rep.rows);
    emit_report(std::move(rep), cfg, args);
    return 0;
}

int cmd_synth(const CommonArgs& args) {
    if (args.out_path.empty()) throw ConfigError("synth: --out <csv path> is required");
    const Config cfg = Config::parse_file(args.config_path);
    const SyntheticSpec spec = synth_spec_from(cfg, args);
    const SynthResult result = synth_generate(spec);
    write_dataset_csv(result.dataset, result.schema, args.out_path);

    // A ready-to-run companion config pointing at the written CSV.
    Config out_cfg;
    out_cfg.set("dataset", "source", "csv");
    out_cfg.set("dataset", "path", args.out_path);
    out_cfg.set("dataset", "label", "y");
    out_cfg.set("dataset", "kind",
                std::string(task_kind_name(result.dataset.kind)));
    out_cfg.set("dataset", "split_fraction",
                format_double(cfg.get_double_or("dataset", "split_fraction", 0.5)));
    out_cfg.set("dataset", "split_seed",
                std::to_string(cfg.get_seed_or("dataset", "split_seed", 0)));

    std::string factor_names, factor_decls;
    if (spec.world == WorldKind::AttributeClasses) {
        out_cfg.set("dataset", "factors", "class");
        out_cfg.set("schema", "mode", "one_hot_atomic");
        out_cfg.set("schema", "factors", "class:" + std::to_string(spec.classes));
        const std::string desc_path = args.out_path + ".descriptors.csv";
        std::ofstream desc_out(desc_path);
        if (!desc_out) throw Error("cannot open '" + desc_path + "' for writing");
        for (const Descriptor& d : result.class_descriptors) {
            for (std::size_t j = 0; j < d.encoded.size(); ++j)
                desc_out << (j ? "," : "") << format_double(d.encoded[j]);
            desc_out << '\n';
        }
        out_cfg.set("protocol", "class_descriptors", desc_path);
    } else {
        for (const Factor& f : result.schema.factors()) {
            factor_names += (factor_names.empty() ? "" : ",") + f.name;
            factor_decls += (factor_decls.empty() ? "" : ",") + f.name + ":" +
                            std::to_string(f.cardinality);
        }
        out_cfg.set("dataset", "factors", factor_names);
        out_cfg.set("schema", "mode", "distributed");
        out_cfg.set("schema", "factors", factor_decls);
    }
    const std::string cfg_path = args.out_path + ".cfg";
    out_cfg.save_file(cfg_path);
    if (!args.quiet)
        std::cout << "synth: " << result.dataset.instances.size() << " instances, "
                  << result.dataset.groups.size() << " groups -> " << args.out_path
                  << " (config " << cfg_path << ")\n";
    return 0;
}

int cmd_baseline(const CommonArgs& args) {
    const Config cfg = Config::parse_file(args.config_path);
    const LoadedData data = load_data(cfg, args);
    const BaselineName name = baseline_from_name(cfg.get("baseline", "name"));
    const ProtocolOptions opts = protocol_options_from(cfg, args);

    if (name == BaselineName::STL) {
        // Independent l2-regularized linear model per domain.
        const Dataset& ds = data.dataset;
        const double lambda = cfg.get_double_or("baseline", "ridge_lambda", 1e-2);
        const Split split =
            make_split(ds, opts.split_fraction, opts.split_seed, Stratify::PerDomain);
        const Dataset train_ds = subset(ds, split.train);
        const LossKind loss =
            ds.kind == TaskKind::Binary ? LossKind::Hinge : LossKind::Squared;
        const auto weights =
            stl_fit(train_ds, loss, lambda, cfg.get_seed_or("train", "seed", 0));

        // Map fitted groups back to original indexing by label.
        std::vector<std::vector<double>> by_orig(ds.groups.size());
        for (std::size_t g = 0; g < train_ds.groups.size(); ++g)
            for (std::size_t o = 0; o < ds.groups.size(); ++o)
                if (ds.groups[o].label == train_ds.groups[g].label) by_orig[o] = weights[g];

        ExperimentReport rep;
        rep.setting = "baseline-STL";
        rep.seed = opts.split_seed;
        rep.metric = ds.kind == TaskKind::Binary ? "error_rate" : "rmse";
        rep.domain_weighting = "n/a";
        std::vector<std::vector<std::size_t>> by_group(ds.groups.size());
        for (std::size_t id : split.test) by_group[ds.instances[id].group].push_back(id);
        for (std::size_t g = 0; g < ds.groups.size(); ++g) {
            if (by_group[g].empty() || by_orig[g].empty()) continue;
            std::vector<double> preds, labels;
            for (std::size_t id : by_group[g]) {
                preds.push_back(dot(ds.instances[id].features, by_orig[g]));
                labels.push_back(ds.instances[id].target);
            }
            rep.rows.push_back({ds.groups[g].label,
                                ds.kind == TaskKind::Binary
                                    ? metric_error_rate(preds, labels)
                                    : metric_rmse(preds, labels)});
        }
        rep.aggregate = mean_of_rows(rep.rows);
        emit_report(std::move(rep), cfg, args);
        return 0;
    }

    const double reg_strength = cfg.get_double_or("baseline", "reg_strength", 1e-3);
    Dataset atomic = data.dataset;
    const BaselineSpec spec =
        make_baseline(name, atomic.groups.size(), atomic.feature_dim, reg_strength);
    atomize_descriptors(atomic, spec.shared_bias);

    TrainConfig tc = train_config_from(cfg, args);
    tc.reg_p = spec.reg_p;
    tc.reg_q = spec.reg_q;
    tc.k = spec.k;

    ExperimentReport rep = run_mdl(atomic, tc, spec.structure, opts);
    rep.setting = "baseline-" + std::string(baseline_name(name));
    emit_report(std::move(rep), cfg, args);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"two-sided network toolkit for multi-task / multi-domain learning"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    struct SubDef {
        const char* name;
        const char* help;
        int (*fn)(const CommonArgs&);
    };
    const SubDef subs[] = {
        {"train", "fit a model on the training split and save a checkpoint", cmd_train},
        {"eval", "evaluate a checkpoint on the test split", cmd_eval},
        {"mdl", "multi-domain learning: all domains trained together", cmd_mdl},
        {"zsda", "zero-shot domain adaptation: leave-one-domain-out", cmd_zsda},
        {"zsl", "zero-shot learning over held-out classes", cmd_zsl},
        {"mtl", "multi-task one-vs-rest multiclass learning", cmd_mtl},
        {"mdmt", "joint multi-domain multi-task learning", cmd_mdmt},
        {"synth", "generate a synthetic dataset and companion config", cmd_synth},
        {"baseline", "run a classic MTL/MDL baseline reconstruction", cmd_baseline},
    };
    for (const SubDef& def : subs) {
        CLI::App* sub = app.add_subcommand(def.name, def.help);
        add_common(sub, args);
        sub->callback([&handler, fn = def.fn] { handler = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "tsnet: " << e.what() << '\n';
        std::cerr << app.help() << '\n';
        return 2;
    }

    try {
        return handler ? handler(args) : 2;
    } catch (const Error& e) {
        std::cerr << "tsnet: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "tsnet: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tsnet::cli
