#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skewlab/point_set.hpp"

namespace skewlab {

struct SearchConfig {
    double time_budget_seconds = 60.0;
    bool symmetry_breaking = true;
    std::optional<PointSet2> incumbent;
};

struct ExtremalResult {
    std::int64_t n = 0;
    std::int64_t value = 0;
    PointSet2 witness;
    bool optimal = false;
    std::uint64_t nodes_explored = 0;
};

// Exact s(n) by enumeration of all 2^{n^2} subsets; n <= 5.
ExtremalResult brute_force_s(int n);

// Exact (budget permitting) s(n) by column-major branch and bound with
// forced-empty-column propagation and y-reflection symmetry breaking.
ExtremalResult branch_and_bound_s(int n, const SearchConfig& config = {});

// Baseline size-n skew-corner-free witnesses.
PointSet2 construct_one_per_column(int n);
PointSet2 construct_single_column(int n);

// AP3-free subset of [n] via the Behrend digit construction.
std::vector<std::int64_t> construct_behrend(std::int64_t n);

// 3-loop oracle: true iff the set has no x, z distinct with (x+z)/2 also in it.
bool is_ap3_free(const std::vector<std::int64_t>& elems);

}  // namespace skewlab
