#include <doctest.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "skewlab/detect.hpp"
#include "skewlab/json_io.hpp"
#include "skewlab/point_set.hpp"
#include "test_util.hpp"

using namespace skewlab;
using testutil::md;

namespace {

// 4-loop brute-force oracle over all (x, y, a, y') tuples.
std::optional<SkewCornerWitness> oracle_find_corner(const PointSet2& A) {
    const auto& dom = A.domain();
    const bool grid = dom.kind == DomainKind::grid;
    const std::int64_t lo = grid ? 1 : 0;
    const std::int64_t hi = grid ? dom.size : dom.size - 1;
    std::optional<SkewCornerWitness> best;
    for (std::int64_t x = lo; x <= hi; ++x)
        for (std::int64_t y = lo; y <= hi; ++y)
            for (std::int64_t a = grid ? lo - hi : 1; a <= hi; ++a) {
                if (a == 0) continue;
                for (std::int64_t yp = lo; yp <= hi; ++yp) {
                    const std::int64_t y2 = grid ? y + a : md(y + a, dom.size);
                    const std::int64_t x2 = grid ? x + a : md(x + a, dom.size);
                    if (grid && (y2 < 1 || y2 > hi || x2 < 1 || x2 > hi)) continue;
                    if (A.contains(x, y) && A.contains(x, y2) && A.contains(x2, yp)) {
                        SkewCornerWitness w{x, y, yp, a};
                        if (!best || std::tie(w.x, w.y, w.a, w.yprime) <
                                         std::tie(best->x, best->y, best->a, best->yprime))
                            best = w;
                    }
                }
            }
    return best;
}

std::uint64_t oracle_count(const PointSet2& A) {
    const auto& dom = A.domain();
    const bool grid = dom.kind == DomainKind::grid;
    const std::int64_t lo = grid ? 1 : 0;
    const std::int64_t hi = grid ? dom.size : dom.size - 1;
    std::uint64_t c = 0;
    for (std::int64_t x = lo; x <= hi; ++x)
        for (std::int64_t y = lo; y <= hi; ++y)
            for (std::int64_t a = grid ? lo - hi : 1; a <= hi; ++a) {
                if (a == 0) continue;
                for (std::int64_t yp = lo; yp <= hi; ++yp) {
                    const std::int64_t y2 = grid ? y + a : md(y + a, dom.size);
                    const std::int64_t x2 = grid ? x + a : md(x + a, dom.size);
                    if (grid && (y2 < 1 || y2 > hi || x2 < 1 || x2 > hi)) continue;
                    if (A.contains(x, y) && A.contains(x, y2) && A.contains(x2, yp)) ++c;
                }
            }
    return c;
}

}  // namespace

TEST_CASE("find_skew_corner agrees with the 4-loop oracle on grids") {
    CounterRng rng(101);
    for (int trial = 0; trial < 120; ++trial) {
        const auto A = testutil::random_point_set(Domain::grid(6), 0.3, rng);
        const auto got = find_skew_corner(A);
        const auto want = oracle_find_corner(A);
        REQUIRE(bool(got) == bool(want));
        if (got) {
            // Both witnesses must be valid corners; ours must be lex-least.
            CHECK(A.contains(got->x, got->y));
            CHECK(A.contains(got->x, got->y + got->a));
            CHECK(A.contains(got->x + got->a, got->yprime));
            CHECK(got->a != 0);
            CHECK(*got == *want);
        }
    }
}

TEST_CASE("find_skew_corner agrees with the oracle on cyclic domains") {
    CounterRng rng(102);
    for (int trial = 0; trial < 60; ++trial) {
        const auto A = testutil::random_point_set(Domain::cyclic(7), 0.25, rng);
        const auto got = find_skew_corner(A);
        const auto want = oracle_find_corner(A);
        CHECK(bool(got) == bool(want));
    }
}

TEST_CASE("count_skew_corners matches the oracle and reflection invariance") {
    CounterRng rng(103);
    for (int trial = 0; trial < 60; ++trial) {
        const auto A = testutil::random_point_set(Domain::grid(5), 0.35, rng);
        const auto c = count_skew_corners(A);
        CHECK(c == oracle_count(A));
        CHECK(count_skew_corners(A.reflect_y()) == c);
        CHECK(bool(find_skew_corner(A)) == (c > 0));
    }
    for (int trial = 0; trial < 30; ++trial) {
        const auto A = testutil::random_point_set(Domain::cyclic(6), 0.3, rng);
        CHECK(count_skew_corners(A.reflect_y()) == count_skew_corners(A));
    }
}

TEST_CASE("skew_form on indicators reconciles with count_skew_corners") {
    CounterRng rng(104);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t N = 5 + std::int64_t(trial % 3);
        const auto A = testutil::random_point_set(Domain::cyclic(N), 0.4, rng);
        auto f = FunctionTable2::torus(N);
        for (const auto& p : A.points())
            f.set(std::size_t(p.x), std::size_t(p.y), 1.0);
        const double form = skew_form(f, f, f);
        // N^4 * form counts tuples including a = 0; the a = 0 slice is
        // sum_x |col(x)|^2 over pairs (y, y') both in A's column x... with
        // the middle point y + 0 = y, so it is sum_x |col(x)|^2.
        std::uint64_t a0 = 0;
        for (std::int64_t x = 0; x < N; ++x) {
            const auto k = A.column_count(x);
            a0 += std::uint64_t(k) * k;
        }
        const double total = form * double(N) * double(N) * double(N) * double(N);
        CHECK(total == doctest::Approx(double(count_skew_corners(A) + a0)).epsilon(1e-9));
    }
}

TEST_CASE("six-point lift: corner iff configuration, witness round trip") {
    CounterRng rng(105);
    for (int trial = 0; trial < 80; ++trial) {
        IntSet1 B;
        B.n = 12;
        for (std::int64_t v = 1; v <= B.n; ++v)
            if (rng.next_unit() < 0.45) B.elements.insert(v);
        const auto lifted = lift_to_skew_instance(B);
        const auto corner = find_skew_corner(lifted);
        const auto six = find_six_point_config(B);
        if (corner) {
            const auto w = map_witness(*corner, B);
            CHECK(is_valid_six_point_witness(w, B));
        }
        if (six) CHECK(is_valid_six_point_witness(*six, B));
    }
}

TEST_CASE("lift_to_skew_instance matches its definition") {
    IntSet1 B;
    B.n = 9;
    B.elements = {1, 2, 3, 5, 7, 9};
    const auto A = lift_to_skew_instance(B);
    for (std::int64_t x = 1; x <= B.n; ++x)
        for (std::int64_t y = 1; y <= B.n; ++y) {
            const bool in = y >= 1 && x + 2 * y <= B.n && B.contains(x) &&
                            B.contains(x + y) && B.contains(x + 2 * y);
            CHECK(A.contains(x, y) == in);
        }
}

TEST_CASE("find_six_point_config validity on dense sets") {
    IntSet1 B;
    B.n = 6;
    for (std::int64_t v = 1; v <= 6; ++v) B.elements.insert(v);
    const auto w = find_six_point_config(B);
    REQUIRE(w);
    CHECK(is_valid_six_point_witness(*w, B));
    CHECK(w->a != 0);
}

TEST_CASE("point set JSON round trip") {
    CounterRng rng(106);
    const auto A = testutil::random_point_set(Domain::grid(7), 0.3, rng);
    CHECK(point_set_from_json(to_json(A)) == A);
    const auto C = testutil::random_point_set(Domain::cyclic(9), 0.3, rng);
    CHECK(point_set_from_json(to_json(C)) == C);

    IntSet1 B;
    B.n = 11;
    B.elements = {2, 3, 5, 7, 11};
    const auto B2 = int_set_from_json(to_json(B));
    CHECK(B2.n == B.n);
    CHECK(B2.elements == B.elements);
}

TEST_CASE("function table JSON and CSV round trips") {
    CounterRng rng(107);
    const auto t = testutil::random_table({0, 2, 5}, {1, 4}, rng);
    const auto tj = table_from_json(to_json(t));
    const auto tc = table_from_csv(table_to_csv(t));
    REQUIRE(tj.nrows() == t.nrows());
    REQUIRE(tc.ncols() == t.ncols());
    for (std::size_t i = 0; i < t.nrows(); ++i)
        for (std::size_t j = 0; j < t.ncols(); ++j) {
            CHECK(tj.at(i, j) == t.at(i, j));
            CHECK(tc.at(i, j) == t.at(i, j));
        }
}
