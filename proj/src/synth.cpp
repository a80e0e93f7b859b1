#include "tsnet/synth.hpp"

#include <cmath>
#include <fstream>

#include "tsnet/config.hpp"
#include "tsnet/error.hpp"
#include "tsnet/rng.hpp"

namespace tsnet {

std::string_view world_kind_name(WorldKind kind) {
    switch (kind) {
        case WorldKind::BilinearPlanted: return "bilinear_planted";
        case WorldKind::AdditiveEffects: return "additive_effects";
        case WorldKind::AttributeClasses: return "attribute_classes";
    }
    return "?";
}

WorldKind world_kind_from_name(std::string_view name) {
    if (name == "bilinear_planted") return WorldKind::BilinearPlanted;
    if (name == "additive_effects") return WorldKind::AdditiveEffects;
    if (name == "attribute_classes") return WorldKind::AttributeClasses;
    throw ValueError("unknown synthetic world '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
    if (d < 1) throw ConfigError("synth: d must be >= 1");
    if (noise < 0.0) throw ConfigError("synth: noise must be >= 0");
    if (instances_per_domain < 1)
        throw ConfigError("synth: instances_per_domain must be >= 1");
    if (world == WorldKind::AttributeClasses) {
        if (classes < 2) throw ConfigError("synth: attribute_classes needs >= 2 classes");
        if (attr_dim < 1) throw ConfigError("synth: attr_dim must be >= 1");
    } else {
        if (factor_cards.empty()) throw ConfigError("synth: no factor cardinalities");
        for (std::size_t c : factor_cards)
            if (c < 1) throw ConfigError("synth: factor cardinality must be >= 1");
        if (world == WorldKind::BilinearPlanted && k_true < 1)
            throw ConfigError("synth: k_true must be >= 1");
    }
}

double SynthOracle::predict(std::span<const double> x, const Descriptor& desc) const {
    switch (world) {
        case WorldKind::BilinearPlanted: {
            const auto h = vecmat(x, p_star);
            auto g = vecmat(desc.encoded, q_star);
            double acc = 0.0;
            for (std::size_t k = 0; k < h.size(); ++k)
                if (g[k] > 0.0) acc += h[k] * g[k];
            return acc;
        }
        case WorldKind::AdditiveEffects: {
            std::vector<double> w = w0;
            const bool with_task = !task_effects.empty();
            const std::size_t n_domain = desc.levels.size() - (with_task ? 1 : 0);
            for (std::size_t f = 0; f < n_domain; ++f)
                for (std::size_t j = 0; j < w.size(); ++j)
                    w[j] += factor_effects[f][desc.levels[f]][j];
            if (with_task)
                for (std::size_t j = 0; j < w.size(); ++j)
                    w[j] += task_effects[desc.levels.back()][j];
            return dot(x, w);
        }
        case WorldKind::AttributeClasses: {
            // Score of x against the prototype built from the descriptor.
            const auto w = matvec(attr_map, desc.encoded);
            return dot(x, w);
        }
    }
    return 0.0;
}

namespace {

std::vector<Factor> grid_factors(const std::vector<std::size_t>& cards,
                                 std::size_t tasks) {
    std::vector<Factor> factors;
    for (std::size_t f = 0; f < cards.size(); ++f)
        factors.push_back({"factor" + std::to_string(f), cards[f]});
    if (tasks > 0) factors.push_back({"task", tasks});
    return factors;
}

std::string cell_label(const std::vector<std::size_t>& levels) {
    std::string label = "cell";
    for (std::size_t l : levels) label += "-" + std::to_string(l);
    return label;
}

std::vector<double> random_vector(std::size_t n, rng::Engine& eng, double scale) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng::normal(eng);
    return v;
}

SynthResult generate_bilinear(const SyntheticSpec& spec) {
    SynthResult out;
    out.schema = DescriptorSchema(grid_factors(spec.factor_cards, 0),
                                  EncodingMode::Distributed, false);
    out.oracle.world = WorldKind::BilinearPlanted;
    out.dataset.kind = TaskKind::Regression;

    rng::Engine eng(spec.seed);
    out.oracle.p_star = Matrix(spec.d, spec.k_true);
    for (double& v : out.oracle.p_star.data()) v = rng::uniform(eng, -1.0, 1.0);
    // Nonnegative right side keeps every domain's relu branch alive.
    out.oracle.q_star = Matrix(out.schema.encoded_length(), spec.k_true);
    for (double& v : out.oracle.q_star.data()) v = rng::uniform(eng, 0.2, 1.2);

    for (std::size_t cell = 0; cell < out.schema.combination_count(); ++cell) {
        const auto levels = combination_levels(out.schema, cell);
        const Descriptor desc = encode(out.schema, levels);
        const std::size_t g = out.dataset.add_group(cell_label(levels), desc);
        for (std::size_t i = 0; i < spec.instances_per_domain; ++i) {
            auto x = random_vector(spec.d, eng, 1.0);
            const double y = out.oracle.predict(x, desc) + spec.noise * rng::normal(eng);
            out.dataset.add_instance(g, std::move(x), y);
        }
    }
    return out;
}

SynthResult generate_additive(const SyntheticSpec& spec) {
    SynthResult out;
    out.schema = DescriptorSchema(grid_factors(spec.factor_cards, spec.tasks),
                                  EncodingMode::Distributed, false);
    out.oracle.world = WorldKind::AdditiveEffects;
    out.dataset.kind = TaskKind::Regression;

    rng::Engine eng(spec.seed);
    out.oracle.w0 = random_vector(spec.d, eng, 1.0);
    for (std::size_t c : spec.factor_cards) {
        std::vector<std::vector<double>> levels;
        for (std::size_t l = 0; l < c; ++l) levels.push_back(random_vector(spec.d, eng, 0.7));
        out.oracle.factor_effects.push_back(std::move(levels));
    }
    for (std::size_t t = 0; t < spec.tasks; ++t)
        out.oracle.task_effects.push_back(random_vector(spec.d, eng, 0.7));

    for (std::size_t cell = 0; cell < out.schema.combination_count(); ++cell) {
        const auto levels = combination_levels(out.schema, cell);
        const Descriptor desc = encode(out.schema, levels);
        const std::size_t g = out.dataset.add_group(cell_label(levels), desc);
        for (std::size_t i = 0; i < spec.instances_per_domain; ++i) {
            auto x = random_vector(spec.d, eng, 1.0);
            const double y = out.oracle.predict(x, desc) + spec.noise * rng::normal(eng);
            out.dataset.add_instance(g, std::move(x), y);
        }
    }
    return out;
}

SynthResult generate_attribute_classes(const SyntheticSpec& spec) {
    SynthResult out;
    // Groups carry the raw attribute vectors; the schema is a nominal class
    // index used only when the dataset is written to CSV.
    out.schema = DescriptorSchema({{"class", spec.classes}}, EncodingMode::OneHotAtomic,
                                  false);
    out.oracle.world = WorldKind::AttributeClasses;
    out.dataset.kind = TaskKind::Multiclass;

    rng::Engine eng(spec.seed);
    out.oracle.attr_map = Matrix(spec.d, spec.attr_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.attr_dim));
    for (double& v : out.oracle.attr_map.data()) v = scale * rng::normal(eng);

    for (std::size_t c = 0; c < spec.classes; ++c) {
        Descriptor attrs = raw_descriptor(random_vector(spec.attr_dim, eng, 1.0));
        auto proto = matvec(out.oracle.attr_map, attrs.encoded);
        double norm = std::sqrt(dot(proto, proto));
        if (norm == 0.0) norm = 1.0;
        for (double& v : proto) v /= norm;
        out.oracle.attributes.push_back(attrs);
        out.oracle.prototypes.push_back(proto);
        out.class_descriptors.push_back(attrs);
        out.dataset.add_group("class-" + std::to_string(c), attrs);
    }
    for (std::size_t c = 0; c < spec.classes; ++c) {
        for (std::size_t i = 0; i < spec.instances_per_domain; ++i) {
            std::vector<double> x = out.oracle.prototypes[c];
            for (double& v : x) v += spec.noise * rng::normal(eng);
            out.dataset.add_instance(c, std::move(x), static_cast<double>(c));
        }
    }
    return out;
}

}  // namespace

SynthResult synth_generate(const SyntheticSpec& spec) {
    spec.validate();
    switch (spec.world) {
        case WorldKind::BilinearPlanted: return generate_bilinear(spec);
        case WorldKind::AdditiveEffects: return generate_additive(spec);
        case WorldKind::AttributeClasses: return generate_attribute_classes(spec);
    }
    throw ValueError("synth: unknown world kind");
}

void write_dataset_csv(const Dataset& ds, const DescriptorSchema& schema,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");

    const bool by_levels = !ds.groups.empty() && !ds.groups.front().descriptor.levels.empty();
    if (by_levels) {
        for (const Factor& f : schema.factors()) out << f.name << ',';
    } else {
        out << "class,";
    }
    for (std::size_t j = 0; j < ds.feature_dim; ++j) out << 'f' << j << ',';
    out << "y\n";

    for (const Instance& inst : ds.instances) {
        const Group& g = ds.groups[inst.group];
        if (by_levels) {
            for (std::size_t l : g.descriptor.levels) out << l << ',';
        } else {
            out << inst.group << ',';
        }
        for (double v : inst.features) out << format_double(v) << ',';
        out << format_double(inst.target) << '\n';
    }
    if (!out) throw Error("failed writing dataset to '" + path + "'");
}

}  // namespace tsnet
