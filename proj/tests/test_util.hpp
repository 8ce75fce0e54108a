#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "skewlab/point_set.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/table.hpp"

namespace testutil {

using skewlab::CounterRng;

// Random subset of the grid/torus with inclusion probability p.
inline skewlab::PointSet2 random_point_set(skewlab::Domain dom, double p,
                                           CounterRng& rng) {
    std::vector<skewlab::Point2> pts;
    const std::int64_t lo = dom.kind == skewlab::DomainKind::grid ? 1 : 0;
    const std::int64_t hi = dom.kind == skewlab::DomainKind::grid ? dom.size : dom.size - 1;
    for (std::int64_t x = lo; x <= hi; ++x)
        for (std::int64_t y = lo; y <= hi; ++y)
            if (rng.next_unit() < p) pts.push_back({x, y});
    return skewlab::PointSet2(dom, std::move(pts));
}

inline std::vector<double> random_vector(std::int64_t n, CounterRng& rng,
                                         double lo = -1.0, double hi = 1.0) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = lo + (hi - lo) * rng.next_unit();
    return out;
}

inline skewlab::FunctionTable2 random_torus_table(std::int64_t N, CounterRng& rng,
                                                  double lo = -1.0, double hi = 1.0) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(N));
    for (std::int64_t i = 0; i < N; ++i) idx[static_cast<std::size_t>(i)] = i;
    return skewlab::FunctionTable2(idx, idx, random_vector(N * N, rng, lo, hi));
}

inline skewlab::FunctionTable2 random_table(std::vector<std::int64_t> I,
                                            std::vector<std::int64_t> J,
                                            CounterRng& rng, double lo = -1.0,
                                            double hi = 1.0) {
    auto vals = random_vector(static_cast<std::int64_t>(I.size() * J.size()), rng, lo, hi);
    return skewlab::FunctionTable2(std::move(I), std::move(J), std::move(vals));
}

// Random subset of the residues 0..N-1 with inclusion probability p,
// always containing 0 so index sets are nonempty.
inline std::vector<std::int64_t> random_residue_set(std::int64_t N, double p,
                                                    CounterRng& rng) {
    std::vector<std::int64_t> out{0};
    for (std::int64_t x = 1; x < N; ++x)
        if (rng.next_unit() < p) out.push_back(x);
    return out;
}

inline std::int64_t md(std::int64_t v, std::int64_t N) {
    v %= N;
    return v < 0 ? v + N : v;
}

}  // namespace testutil
