#include "tsnet/splits.hpp"

#include <algorithm>
#include <cmath>

#include "tsnet/error.hpp"
#include "tsnet/rng.hpp"

namespace tsnet {

std::string_view stratify_name(Stratify s) {
    switch (s) {
        case Stratify::PerDomain: return "per_domain";
        case Stratify::PerClass: return "per_class";
        case Stratify::None: return "none";
    }
    return "?";
}

Stratify stratify_from_name(std::string_view name) {
    if (name == "per_domain") return Stratify::PerDomain;
    if (name == "per_class") return Stratify::PerClass;
    if (name == "none") return Stratify::None;
    throw ValueError("unknown stratification '" + std::string(name) + "'");
}

namespace {

void split_block(const std::vector<std::size_t>& ids, double fraction, rng::Engine& eng,
                 Split& out) {
    std::vector<std::size_t> shuffled = ids;
    rng::shuffle(shuffled, eng);
    std::size_t n_train;
    if (shuffled.size() < 2) {
        n_train = shuffled.size();
    } else {
        const auto want = static_cast<std::size_t>(
            std::lround(fraction * static_cast<double>(shuffled.size())));
        n_train = std::clamp<std::size_t>(want, 1, shuffled.size() - 1);
    }
    for (std::size_t i = 0; i < shuffled.size(); ++i)
        (i < n_train ? out.train : out.test).push_back(shuffled[i]);
}

}  // namespace

Split make_split(const Dataset& ds, double fraction, std::uint64_t seed,
                 Stratify stratification) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("split: fraction must be in (0, 1), got " +
                          std::to_string(fraction));
    if (ds.instances.empty()) throw ValueError("split: empty dataset");

    Split out;
    out.fraction = fraction;
    out.seed = seed;
    out.stratification = stratification;

    rng::Engine eng(seed);
    if (stratification == Stratify::None) {
        std::vector<std::size_t> all(ds.instances.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        split_block(all, fraction, eng, out);
    } else {
        for (const Group& g : ds.groups) split_block(g.members, fraction, eng, out);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace tsnet
