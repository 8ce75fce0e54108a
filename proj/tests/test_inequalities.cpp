#include <doctest.h>

#include <cmath>
#include <vector>

#include "skewlab/inequalities.hpp"
#include "skewlab/norms.hpp"
#include "test_util.hpp"

using namespace skewlab;
using testutil::md;

namespace {

std::vector<FunctionTable2> random_tables(std::int64_t N, int count, CounterRng& rng) {
    std::vector<FunctionTable2> out;
    for (int i = 0; i < count; ++i) out.push_back(testutil::random_torus_table(N, rng));
    return out;
}

std::vector<const FunctionTable2*> ptrs(const std::vector<FunctionTable2>& ts) {
    std::vector<const FunctionTable2*> out;
    for (const auto& t : ts) out.push_back(&t);
    return out;
}

}  // namespace

TEST_CASE("Gowers-Holder (i): holds on random instances, equality at equal slots") {
    CounterRng rng(401);
    for (int r : {2, 4}) {
        for (int trial = 0; trial < 40; ++trial) {
            const std::int64_t N = 5 + std::int64_t(rng.next_below(5));
            const auto fs = random_tables(N, r, rng);
            const auto gs = random_tables(N, r, rng);
            const auto B = testutil::random_residue_set(N, 0.5, rng);
            const auto Bp = testutil::random_residue_set(N, 0.5, rng);
            CHECK(check_gowers_holder_i(ptrs(fs), ptrs(gs), B, Bp).holds);
        }
    }
    // equality when all slots carry the same table
    const std::int64_t N = 6;
    const auto f = testutil::random_torus_table(N, rng);
    std::vector<const FunctionTable2*> same{&f, &f};
    const auto B = testutil::random_residue_set(N, 0.6, rng);
    const auto Bp = testutil::random_residue_set(N, 0.6, rng);
    const auto v = check_gowers_holder_i(same, same, B, Bp);
    CHECK(v.lhs == doctest::Approx(v.rhs).epsilon(1e-9));
}

TEST_CASE("Gowers-Holder (ii): holds including odd r; zero gs") {
    CounterRng rng(402);
    for (int r : {1, 2, 3, 4}) {
        for (int trial = 0; trial < 25; ++trial) {
            const std::int64_t N = 5 + std::int64_t(rng.next_below(4));
            const auto fs = random_tables(N, r, rng);
            const auto gs = random_tables(N, r, rng);
            const auto B = testutil::random_residue_set(N, 0.5, rng);
            const auto Bp = testutil::random_residue_set(N, 0.5, rng);
            CHECK(check_gowers_holder_ii(ptrs(fs), ptrs(gs), B, Bp).holds);
        }
    }
    const std::int64_t N = 5;
    const auto fs = random_tables(N, 2, rng);
    const auto zero = FunctionTable2::torus(N, 0.0);
    std::vector<const FunctionTable2*> zs{&zero, &zero};
    const auto v = check_gowers_holder_ii(ptrs(fs), zs, {0, 1}, {0, 2});
    CHECK(v.lhs == doctest::Approx(0.0));
    CHECK(v.holds);
}

TEST_CASE("grid GCS: holds on random k x l matrices, equality at equal entries") {
    CounterRng rng(403);
    for (int k : {2, 4}) {
        const int l = 2;
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<std::vector<FunctionTable2>> mat;
            const auto rows = testutil::random_residue_set(5, 0.9, rng);
            const auto cols = testutil::random_residue_set(5, 0.9, rng);
            for (int i = 0; i < k; ++i) {
                std::vector<FunctionTable2> row;
                for (int j = 0; j < l; ++j)
                    row.push_back(testutil::random_table(rows, cols, rng));
                mat.push_back(std::move(row));
            }
            std::vector<std::vector<const FunctionTable2*>> m;
            for (const auto& row : mat) m.push_back(ptrs(row));
            CHECK(check_grid_gcs(m).holds);
        }
    }
    // all entries equal -> lhs = rhs
    const auto f = testutil::random_table({0, 1, 2}, {0, 1, 2}, rng);
    std::vector<std::vector<const FunctionTable2*>> m{{&f, &f}, {&f, &f}};
    const auto v = check_grid_gcs(m);
    CHECK(v.lhs == doctest::Approx(v.rhs).epsilon(1e-9));
}

TEST_CASE("binomial lemma: worked examples and the acceptance grid") {
    const auto a = binomial_sum_check(2, 4, 1, 1);
    CHECK(a.rhs == doctest::Approx(7.0));
    CHECK(a.lhs == doctest::Approx(std::pow(1.5, 4)));
    CHECK(a.holds);

    const auto b = binomial_sum_check(2, 8, 1, 2);
    CHECK(b.rhs == doctest::Approx(28.0 / 4 + 70.0 / 16 + 28.0 / 64 + 1.0 / 256));
    CHECK(b.lhs == doctest::Approx(std::pow(1.25, 8)));
    CHECK(b.holds);

    for (int r : {2, 4, 8})
        for (int den : {1, 2, 4, 8}) {
            const int rp_min = 2 * den * r;  // ceil(2 eps^-1 r), eps = 1/den
            for (int rp : {rp_min, rp_min + 2, 64}) {
                if (rp < rp_min) continue;  // hypothesis void, still checked below
                CHECK(binomial_sum_check(r, rp, 1, den).holds);
            }
        }
}

TEST_CASE("U^2 control: random odd-N instances, even N rejected") {
    CounterRng rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t N = 5 + 2 * std::int64_t(rng.next_below(6));
        auto f1 = testutil::random_vector(N, rng);
        auto f2 = testutil::random_vector(N, rng);
        auto f3 = testutil::random_vector(N, rng);
        const auto v = check_u2_control(f1, f2, f3);
        CHECK(v.holds);
        // lhs recomputation
        double s = 0;
        for (std::int64_t x = 0; x < N; ++x)
            for (std::int64_t a = 0; a < N; ++a)
                s += f1[std::size_t(x)] * f2[std::size_t(md(x + a, N))] *
                     f3[std::size_t(md(x + 2 * a, N))];
        CHECK(v.lhs == doctest::Approx(std::abs(s / double(N * N))).epsilon(1e-9));
    }
    CHECK_THROWS(check_u2_control(std::vector<double>(4, 1.0),
                                  std::vector<double>(4, 1.0),
                                  std::vector<double>(4, 1.0)));
}

TEST_CASE("skew control report: soft verdicts evaluated, trivial cases") {
    CounterRng rng(405);
    const std::int64_t N = 5;
    const auto zero = FunctionTable2::torus(N, 0.0);
    const auto rz = check_skew_control(zero, zero, zero);
    CHECK(rz.lambda == doctest::Approx(0.0));

    const auto one = FunctionTable2::torus(N, 1.0);
    const auto r1 = check_skew_control(one, one, one);
    CHECK(r1.lambda == doctest::Approx(1.0));
    CHECK(r1.via_f1_f2.rhs == doctest::Approx(1.0).epsilon(1e-9));

    for (int trial = 0; trial < 10; ++trial) {
        const auto f1 = testutil::random_torus_table(N, rng);
        const auto f2 = testutil::random_torus_table(N, rng);
        const auto f3 = testutil::random_torus_table(N, rng);
        const auto rep = check_skew_control(f1, f2, f3);
        CHECK(std::isfinite(rep.lambda));  // soft: recorded, not asserted
    }
}

TEST_CASE("ap_conclusion_check: B'={0} and D=full give lhs 0") {
    CounterRng rng(406);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t N = 16 + std::int64_t(rng.next_below(33));
        auto B1 = build_bohr(N, {1}, 0.9);
        auto B2 = build_bohr(N, {1}, 0.7);
        std::vector<std::int64_t> Y, Z;
        for (std::int64_t y : B1.elements())
            if (rng.next_unit() < 0.7) Y.push_back(y);
        for (std::int64_t z : B2.elements())
            if (rng.next_unit() < 0.7) Z.push_back(z);
        if (Y.empty()) Y.push_back(0);
        if (Z.empty()) Z.push_back(0);
        ApInstance inst{B1, B2, Y, Z, testutil::random_residue_set(N, 0.4, rng),
                        0.25};

        const auto trivialB = build_bohr(N, {1}, 0.0);
        REQUIRE(trivialB.size() == 1);
        CHECK(ap_conclusion_check(inst, trivialB).lhs == doctest::Approx(0.0));

        ApInstance full = inst;
        full.D.clear();
        for (std::int64_t v = 0; v < N; ++v) full.D.push_back(v);
        const auto anyB = build_bohr(N, {1}, 0.5);
        CHECK(ap_conclusion_check(full, anyB).lhs == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("ap_search witnesses re-verify and are regular subsets of B2") {
    CounterRng rng(407);
    int found_count = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t N = 24 + std::int64_t(rng.next_below(41));
        auto B1 = build_bohr(N, {1}, 1.2);
        auto B2 = build_bohr(N, {1}, 1.0);
        std::vector<std::int64_t> Y, Z, D;
        for (std::int64_t y : B1.elements())
            if (rng.next_unit() < 0.8) Y.push_back(y);
        for (std::int64_t z : B2.elements())
            if (rng.next_unit() < 0.8) Z.push_back(z);
        for (std::int64_t v = 0; v < N; ++v)
            if (rng.next_unit() < 0.85) D.push_back(v);
        if (Y.empty()) Y.push_back(0);
        if (Z.empty()) Z.push_back(0);
        ApInstance inst{B1, B2, Y, Z, D, 0.5};
        const auto found =
            ap_search(inst, 1, {1.0, 0.75, 0.5, 0.25, 0.1});
        if (!found) continue;
        ++found_count;
        const auto v = ap_conclusion_check(inst, *found);
        CHECK(v.holds);
        CHECK(certify_regular(*found).regular);
        for (std::int64_t b : found->elements()) CHECK(B2.contains(b));
    }
    CHECK(found_count > 0);
}
