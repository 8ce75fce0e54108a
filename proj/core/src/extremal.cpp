#include "skewlab/extremal.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "skewlab/detect.hpp"

namespace skewlab {

namespace {

using Clock = std::chrono::steady_clock;

// Positive vertical gaps present in a column bitmask.
std::vector<int> gaps_of(std::uint32_t col, int n) {
    std::vector<int> out;
    for (int d = 1; d < n; ++d)
        if (col & (col >> d)) out.push_back(d);
    return out;
}

// Corner-freeness of a full column-mask assignment: a column with a gap d
// forbids any point in columns x-d and x+d.
bool masks_corner_free(const std::vector<std::uint32_t>& cols, int n) {
    for (int x = 0; x < n; ++x) {
        if (std::popcount(cols[x]) < 2) continue;
        for (int d : gaps_of(cols[x], n)) {
            if (x - d >= 0 && cols[x - d]) return false;
            if (x + d < n && cols[x + d]) return false;
        }
    }
    return true;
}

PointSet2 masks_to_set(const std::vector<std::uint32_t>& cols, int n) {
    std::vector<Point2> pts;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (cols[x] & (1u << y)) pts.push_back({x + 1, y + 1});
    return PointSet2(Domain::grid(n), std::move(pts));
}

std::uint32_t reflect_mask(std::uint32_t m, int n) {
    std::uint32_t out = 0;
    for (int y = 0; y < n; ++y)
        if (m & (1u << y)) out |= 1u << (n - 1 - y);
    return out;
}

}  // namespace

ExtremalResult brute_force_s(int n) {
    if (n < 1) throw std::invalid_argument("brute_force_s: n >= 1");
    if (n > 5)
        throw std::invalid_argument(
            "brute_force_s: n > 5 enumerates > 2^25 subsets; use branch_and_bound_s");

    ExtremalResult res;
    res.n = n;
    const std::uint64_t total = 1ull << (n * n);
    std::vector<std::uint32_t> cols(n), best(n, 0);
    const std::uint32_t colmask = (1u << n) - 1;
    int best_count = -1;
    for (std::uint64_t m = 0; m < total; ++m) {
        ++res.nodes_explored;
        const int cnt = std::popcount(m);
        if (cnt <= best_count) continue;
        for (int x = 0; x < n; ++x)
            cols[x] = static_cast<std::uint32_t>(m >> (x * n)) & colmask;
        if (!masks_corner_free(cols, n)) continue;
        best_count = cnt;
        best = cols;
    }
    res.value = best_count;
    res.witness = masks_to_set(best, n);
    res.optimal = true;
    return res;
}

namespace {

struct BnB {
    int n;
    bool sym;
    Clock::time_point deadline;
    std::vector<std::vector<std::uint32_t>> masks_by_col;  // per-column candidates
    std::vector<std::uint32_t> cols;
    std::vector<int> forced;  // forced-empty depth counters
    std::vector<std::uint32_t> best_cols;
    int best = -1;
    std::uint64_t nodes = 0;
    bool timed_out = false;

    bool out_of_time() {
        if ((nodes & 0x3ff) == 0 && Clock::now() > deadline) timed_out = true;
        return timed_out;
    }

    void run(int x, int count, bool any_placed) {
        ++nodes;
        if (out_of_time()) return;
        if (x == n) {
            if (count > best) {
                best = count;
                best_cols = cols;
            }
            return;
        }
        int remaining = 0;
        for (int xr = x; xr < n; ++xr)
            if (forced[xr] == 0) remaining += n;
        if (count + remaining <= best) return;

        const bool must_be_empty = forced[x] > 0;
        for (std::uint32_t m : masks_by_col[x]) {
            if (must_be_empty && m != 0) continue;
            if (sym && !any_placed && m != 0 && m > reflect_mask(m, n)) continue;

            bool ok = true;
            std::vector<int> marked;
            if (std::popcount(m) >= 2) {
                for (int d : gaps_of(m, n)) {
                    if (x - d >= 0 && cols[x - d]) { ok = false; break; }
                    if (x + d < n) marked.push_back(x + d);
                }
            }
            if (ok && m != 0) {
                // a previously placed column's gap may point at x
                for (int xp = 0; xp < x && ok; ++xp)
                    if (cols[xp] && (cols[xp] & (cols[xp] >> (x - xp)))) ok = false;
            }
            if (ok) {
                cols[x] = m;
                for (int xm : marked) ++forced[xm];
                run(x + 1, count + std::popcount(m), any_placed || m != 0);
                for (int xm : marked) --forced[xm];
                cols[x] = 0;
            }
            if (timed_out) return;
        }
    }
};

}  // namespace

ExtremalResult branch_and_bound_s(int n, const SearchConfig& config) {
    if (n < 1) throw std::invalid_argument("branch_and_bound_s: n >= 1");
    if (n > 31) throw std::invalid_argument("branch_and_bound_s: n > 31 unsupported");

    BnB s;
    s.n = n;
    s.sym = config.symmetry_breaking;
    s.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(
                                        config.time_budget_seconds));
    s.cols.assign(n, 0);
    s.forced.assign(n, 0);
    s.best_cols.assign(n, 0);

    // Candidate masks per column, densest first, ties by value for determinism.
    std::vector<std::uint32_t> all;
    for (std::uint32_t m = 0; m < (1u << n); ++m) all.push_back(m);
    std::stable_sort(all.begin(), all.end(), [](std::uint32_t a, std::uint32_t b) {
        return std::popcount(a) > std::popcount(b);
    });
    s.masks_by_col.assign(n, all);

    if (config.incumbent) {
        const PointSet2& inc = *config.incumbent;
        if (inc.domain().kind == DomainKind::grid &&
            inc.domain().size == n && !find_skew_corner(inc)) {
            s.best = static_cast<int>(inc.size());
            for (const auto& p : inc.points())
                s.best_cols[p.x - 1] |= 1u << (p.y - 1);
        }
    }

    s.run(0, 0, false);

    ExtremalResult res;
    res.n = n;
    res.value = s.best;
    res.witness = masks_to_set(s.best_cols, n);
    res.optimal = !s.timed_out;
    res.nodes_explored = s.nodes;
    return res;
}

PointSet2 construct_one_per_column(int n) {
    std::vector<Point2> pts;
    for (int x = 1; x <= n; ++x) pts.push_back({x, 1});
    return PointSet2(Domain::grid(n), std::move(pts));
}

PointSet2 construct_single_column(int n) {
    std::vector<Point2> pts;
    for (int y = 1; y <= n; ++y) pts.push_back({1, y});
    return PointSet2(Domain::grid(n), std::move(pts));
}

std::vector<std::int64_t> construct_behrend(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("construct_behrend: n >= 1");
    if (n <= 3) return n >= 2 ? std::vector<std::int64_t>{1, 2}
                              : std::vector<std::int64_t>{1};

    std::vector<std::int64_t> best{1};
    const int kmax =
        std::max(1, static_cast<int>(std::ceil(std::sqrt(std::log2(double(n))))) + 1);
    for (int k = 1; k <= kmax; ++k) {
        const auto D =
            static_cast<std::int64_t>(std::floor(std::pow(double(n), 1.0 / k)));
        if (D < 2) continue;
        const std::int64_t m = (D - 1) / 2;  // digits 0..m never carry in x+z

        // Group digit vectors by squared norm; a sphere slice is AP3-free.
        std::map<std::int64_t, std::vector<std::int64_t>> spheres;
        std::vector<std::int64_t> digit(k, 0);
        while (true) {
            std::int64_t val = 0, norm = 0;
            for (int i = k - 1; i >= 0; --i) {
                val = val * D + digit[i];
                norm += digit[i] * digit[i];
            }
            if (val < n) spheres[norm].push_back(val + 1);
            int pos = 0;
            while (pos < k && ++digit[pos] > m) digit[pos++] = 0;
            if (pos == k) break;
        }
        for (auto& [norm, elems] : spheres)
            if (norm > 0 && elems.size() > best.size()) best = elems;
    }
    std::sort(best.begin(), best.end());
    return best;
}

bool is_ap3_free(const std::vector<std::int64_t>& elems) {
    std::vector<std::int64_t> v(elems);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const std::int64_t sum = v[i] + v[j];
            if (sum % 2 == 0 &&
                std::binary_search(v.begin(), v.end(), sum / 2))
                return false;
        }
    return true;
}

}  // namespace skewlab
