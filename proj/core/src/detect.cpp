#include "skewlab/detect.hpp"

#include <algorithm>
#include <stdexcept>

#include "skewlab/kahan.hpp"

namespace skewlab {

namespace {

// Ascending nonzero offsets a admissible at (x, y): both y+a and x+a must
// stay in the domain. For the torus every residue 1..N-1 qualifies.
std::vector<std::int64_t> admissible_offsets(const Domain& dom, std::int64_t x,
                                             std::int64_t y) {
    std::vector<std::int64_t> as;
    if (dom.kind == DomainKind::cyclic) {
        as.reserve(static_cast<std::size_t>(dom.size - 1));
        for (std::int64_t a = 1; a < dom.size; ++a) as.push_back(a);
    } else {
        const std::int64_t lo = std::max(1 - y, 1 - x);
        const std::int64_t hi = std::min(dom.size - y, dom.size - x);
        for (std::int64_t a = lo; a <= hi; ++a)
            if (a != 0) as.push_back(a);
    }
    return as;
}

}  // namespace

std::optional<SkewCornerWitness> find_skew_corner(const PointSet2& A) {
    const Domain& dom = A.domain();
    for (std::int64_t x : A.occupied_columns()) {
        for (std::int64_t y : A.column(x)) {
            for (std::int64_t a : admissible_offsets(dom, x, y)) {
                const std::int64_t y2 = dom.normalize(y + a);
                if (!A.contains(x, y2)) continue;
                const auto& col = A.column(dom.normalize(x + a));
                if (col.empty()) continue;
                return SkewCornerWitness{x, y, col.front(), a};
            }
        }
    }
    return std::nullopt;
}

std::uint64_t count_skew_corners(const PointSet2& A) {
    const Domain& dom = A.domain();
    std::uint64_t total = 0;
    for (std::int64_t x : A.occupied_columns()) {
        const auto& col = A.column(x);
        for (std::int64_t y1 : col) {
            for (std::int64_t y2 : col) {
                if (y1 == y2) continue;
                const std::int64_t a = y2 - y1;  // nonzero; mod N for cyclic
                if (dom.kind == DomainKind::grid &&
                    (x + a < 1 || x + a > dom.size))
                    continue;
                total += A.column_count(dom.normalize(x + a));
            }
        }
    }
    return total;
}

double skew_form(const FunctionTable2& f1, const FunctionTable2& f2,
                 const FunctionTable2& f3) {
    const std::int64_t N = f1.torus_modulus();
    if (!f1.is_full_torus(N) || !f2.is_full_torus(N) || !f3.is_full_torus(N))
        throw std::invalid_argument("skew_form: all tables must be full-torus");

    // g3(u) = E_{y'} f3(u, y'), then average E_{x,a} [E_y f1(x,y) f2(x,y+a)] g3(x+a).
    std::vector<double> g3(static_cast<std::size_t>(N));
    for (std::int64_t u = 0; u < N; ++u) {
        KahanSum s;
        for (std::int64_t yp = 0; yp < N; ++yp) s.add(f3.torus_at(u, yp));
        g3[static_cast<std::size_t>(u)] = s.value() / static_cast<double>(N);
    }
    KahanSum total;
    for (std::int64_t x = 0; x < N; ++x) {
        for (std::int64_t a = 0; a < N; ++a) {
            KahanSum inner;
            for (std::int64_t y = 0; y < N; ++y)
                inner.add(f1.torus_at(x, y) * f2.torus_at(x, y + a));
            total.add(inner.value() / static_cast<double>(N) *
                      g3[static_cast<std::size_t>((x + a) % N)]);
        }
    }
    return total.value() / (static_cast<double>(N) * static_cast<double>(N));
}

bool is_valid_six_point_witness(const SixPointWitness& w, const IntSet1& B) {
    if (w.a == 0) return false;
    const std::int64_t vals[6] = {w.x,           w.x + w.y,           w.x + 2 * w.y,
                                  w.x + w.y + w.a, w.x + 2 * w.y + 2 * w.a, w.x + w.a};
    for (std::int64_t v : vals)
        if (!B.contains(v)) return false;
    return true;
}

std::optional<SixPointWitness> find_six_point_config(const IntSet1& B) {
    const std::int64_t n = B.n;
    for (std::int64_t x = 1; x <= n; ++x) {
        if (!B.contains(x)) continue;
        for (std::int64_t y = -n; y <= n; ++y) {
            if (x + 2 * y < 1 || x + 2 * y > n) continue;
            for (std::int64_t a = -n; a <= n; ++a) {
                if (a == 0) continue;
                SixPointWitness w{x, y, a};
                if (is_valid_six_point_witness(w, B)) return w;
            }
        }
    }
    return std::nullopt;
}

PointSet2 lift_to_skew_instance(const IntSet1& B) {
    const std::int64_t n = B.n;
    std::vector<Point2> pts;
    for (std::int64_t x = 1; x <= n; ++x) {
        if (!B.contains(x)) continue;
        for (std::int64_t y = 1; x + 2 * y <= n; ++y) {
            if (B.contains(x + y) && B.contains(x + 2 * y)) pts.push_back({x, y});
        }
    }
    return PointSet2(Domain::grid(n), std::move(pts));
}

SixPointWitness map_witness(const SkewCornerWitness& w, const IntSet1& B) {
    const PointSet2 A = lift_to_skew_instance(B);
    if (w.a == 0 || !A.contains(w.x, w.y) ||
        !A.contains(w.x, w.y + w.a) || !A.contains(w.x + w.a, w.yprime))
        throw std::logic_error("map_witness: not a skew corner of the lifted instance");
    SixPointWitness out{w.x, w.y, w.a};
    if (!is_valid_six_point_witness(out, B))
        throw std::logic_error("map_witness: mapped values escape B");
    return out;
}

}  // namespace skewlab
