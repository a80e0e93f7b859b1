#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tsnet/dataset.hpp"

namespace tsnet {

enum class Stratify { PerDomain, PerClass, None };

std::string_view stratify_name(Stratify s);
Stratify stratify_from_name(std::string_view name);

// A disjoint train/test partition covering the whole dataset. PerDomain and
// PerClass keep the split fraction within every group; None splits the
// pooled index set.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    double fraction = 0.5;
    std::uint64_t seed = 0;
    Stratify stratification = Stratify::PerDomain;
};

// Deterministic per (fraction, seed). A group with a single instance puts it
// in the training side.
Split make_split(const Dataset& ds, double fraction, std::uint64_t seed,
                 Stratify stratification);

}  // namespace tsnet
