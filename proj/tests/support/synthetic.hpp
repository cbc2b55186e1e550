#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "oted/store.hpp"

namespace oted::testing {

struct SyntheticSpec {
    std::size_t rows = 1000;
    /// Probability that any single cell is null.
    double null_density = 0.1;
    std::uint64_t seed = 1;
};

/// A random store over the builtin schema plus, per column, the pool its
/// non-null values were drawn from (handy for picking literals that hit).
struct Synthetic {
    ColumnStore store;
    std::vector<std::vector<Value>> pools;
};

Synthetic make_synthetic(const SyntheticSpec& spec);

/// Real CPV codes used for the CPV column; every division exists in the nomenclature.
const std::vector<std::string>& synthetic_cpv_codes();
/// Country names used for both country columns.
const std::vector<std::string>& synthetic_countries();

/// Uniform integer in [lo, hi].
std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);

}  // namespace oted::testing
