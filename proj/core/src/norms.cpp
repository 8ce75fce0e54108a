#include "skewlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "skewlab/kahan.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

namespace {

double root_clamped(double raw, double exponent) {
    // Exact averages of squares can dip a hair below zero in floating point.
    if (raw < 0 && raw > -1e-12) raw = 0.0;
    if (raw < 0)
        throw std::domain_error("norm root of a negative average");
    return std::pow(raw, 1.0 / exponent);
}

// Autocorrelation c(d) = E_x f(x) f(x+d).
std::vector<double> autocorrelation(const std::vector<double>& f) {
    const std::int64_t N = static_cast<std::int64_t>(f.size());
    std::vector<double> c(f.size());
    for (std::int64_t d = 0; d < N; ++d) {
        KahanSum s;
        for (std::int64_t x = 0; x < N; ++x)
            s.add(f[static_cast<std::size_t>(x)] *
                  f[static_cast<std::size_t>((x + d) % N)]);
        c[static_cast<std::size_t>(d)] = s.value() / static_cast<double>(N);
    }
    return c;
}

}  // namespace

ColumnDensityTable column_density(const PointSet2& A,
                                  const std::vector<std::int64_t>& X,
                                  const std::vector<std::int64_t>& B) {
    if (A.domain().kind != DomainKind::cyclic)
        throw std::invalid_argument("column_density: cyclic domain required");
    if (X.empty() || B.empty())
        throw std::invalid_argument("column_density: empty X or B");
    const std::int64_t N = A.domain().size;
    std::set<std::int64_t> Xset(X.begin(), X.end());
    std::set<std::int64_t> Bset(B.begin(), B.end());
    for (const auto& p : A.points())
        if (!Xset.count(p.x) || !Bset.count(p.y))
            throw std::invalid_argument("column_density: A must lie in X x B");

    ColumnDensityTable out;
    out.N = N;
    out.vd.assign(static_cast<std::size_t>(N), 0.0);
    std::uint64_t total = 0;
    for (std::int64_t x : Xset) {
        std::uint64_t cnt = 0;
        for (std::int64_t y : B)
            if (A.contains(x, y)) ++cnt;
        out.vd[static_cast<std::size_t>(x)] =
            static_cast<double>(cnt) / static_cast<double>(B.size());
        total += cnt;
    }
    out.alpha = static_cast<double>(total) /
                (static_cast<double>(Xset.size()) * static_cast<double>(Bset.size()));
    out.delta = static_cast<double>(Xset.size()) / static_cast<double>(Bset.size());
    return out;
}

BalancedTable balanced(const PointSet2& A, const std::vector<std::int64_t>& X,
                       const std::vector<std::int64_t>& B) {
    BalancedTable out;
    out.density = column_density(A, X, B);
    const std::int64_t N = out.density.N;
    out.bal = FunctionTable2::torus(N);
    for (std::int64_t x = 0; x < N; ++x) {
        const double vdx = out.density.vd[static_cast<std::size_t>(x)];
        for (std::int64_t y = 0; y < N; ++y) {
            out.bal.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                        (A.contains(x, y) ? 1.0 : 0.0) - vdx);
        }
    }
    return out;
}

NormValue u2_norm(const std::vector<double>& f) {
    const auto c = autocorrelation(f);
    KahanSum s;
    for (double v : c) s.add(v * v);
    NormValue nv;
    nv.raw = s.value() / static_cast<double>(c.size());
    nv.value = root_clamped(nv.raw, 4.0);
    return nv;
}

NormValue km_norm(const std::vector<double>& f, int r) {
    if (r < 1) throw std::invalid_argument("km_norm: r must be >= 1");
    const auto c = autocorrelation(f);
    KahanSum s;
    for (double v : c) s.add(std::pow(v, r));
    NormValue nv;
    nv.raw = s.value() / static_cast<double>(c.size());
    nv.value = root_clamped(nv.raw, 2.0 * r);
    return nv;
}

std::vector<Point2> full_group2(std::int64_t N) {
    std::vector<Point2> h;
    h.reserve(static_cast<std::size_t>(N * N));
    for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t y = 0; y < N; ++y) h.push_back({x, y});
    return h;
}

std::vector<Point2> vertical_group2(std::int64_t N) {
    std::vector<Point2> h;
    h.reserve(static_cast<std::size_t>(N));
    for (std::int64_t y = 0; y < N; ++y) h.push_back({0, y});
    return h;
}

NormValue directional_norm_raw(const FunctionTable2& f,
                               const std::vector<Point2>& H1,
                               const std::vector<Point2>& H2) {
    const std::int64_t N = f.torus_modulus();
    if (!f.is_full_torus(N))
        throw std::invalid_argument("directional_norm_raw: full-torus table required");
    auto check_group = [&](const std::vector<Point2>& H, const char* name) {
        std::set<Point2> s(H.begin(), H.end());
        if (!s.count({0, 0}))
            throw std::invalid_argument(std::string(name) + " must contain 0");
        for (const auto& h : s)
            if (!s.count({(N - h.x) % N, (N - h.y) % N}))
                throw std::invalid_argument(std::string(name) +
                                            " must be closed under negation");
    };
    check_group(H1, "H1");
    check_group(H2, "H2");

    KahanSum outer;
    for (const auto& a1 : H1) {
        // g(x) = f(x) f(x+a1); then average g(x) g(x+a2) over x, a2.
        KahanSum per_a1;
        for (const auto& a2 : H2) {
            KahanSum s;
            for (std::int64_t x = 0; x < N; ++x) {
                for (std::int64_t y = 0; y < N; ++y) {
                    const double g0 = f.torus_at(x, y) * f.torus_at(x + a1.x, y + a1.y);
                    const double g1 = f.torus_at(x + a2.x, y + a2.y) *
                                      f.torus_at(x + a1.x + a2.x, y + a1.y + a2.y);
                    s.add(g0 * g1);
                }
            }
            per_a1.add(s.value() / static_cast<double>(N * N));
        }
        outer.add(per_a1.value() / static_cast<double>(H2.size()));
    }
    NormValue nv;
    nv.raw = outer.value() / static_cast<double>(H1.size());
    nv.value = nv.raw >= 0 ? std::pow(nv.raw, 0.25) : nv.raw;
    return nv;
}

namespace {

// E_{y_1..y_l in J} (E_{x in I} prod_j f(x, y_j))^k via tuple recursion.
double grid_power_rows_inner(const FunctionTable2& f, int k, int l) {
    const std::size_t nI = f.nrows(), nJ = f.ncols();
    std::vector<std::size_t> ys(static_cast<std::size_t>(l), 0);
    KahanSum outer;
    std::uint64_t count = 0;
    while (true) {
        KahanSum inner;
        for (std::size_t i = 0; i < nI; ++i) {
            double prod = 1.0;
            for (std::size_t j = 0; j < ys.size(); ++j) prod *= f.at(i, ys[j]);
            inner.add(prod);
        }
        outer.add(std::pow(inner.value() / static_cast<double>(nI), k));
        ++count;
        std::size_t pos = ys.size();
        while (pos > 0) {
            --pos;
            if (++ys[pos] < nJ) break;
            ys[pos] = 0;
            if (pos == 0) return outer.value() / static_cast<double>(count);
        }
    }
}

FunctionTable2 transpose(const FunctionTable2& f) {
    FunctionTable2 t(f.cols(), f.rows(),
                     std::vector<double>(f.nrows() * f.ncols(), 0.0));
    for (std::size_t i = 0; i < f.nrows(); ++i)
        for (std::size_t j = 0; j < f.ncols(); ++j) t.set(j, i, f.at(i, j));
    return t;
}

}  // namespace

NormValue grid_norm(const FunctionTable2& f, int k, int l) {
    if (k < 2 || l < 2 || k % 2 != 0 || l % 2 != 0)
        throw std::invalid_argument("grid_norm: k and l must be positive even");
    const double cost_rows =
        std::pow(static_cast<double>(f.ncols()), l) * static_cast<double>(f.nrows());
    const double cost_cols =
        std::pow(static_cast<double>(f.nrows()), k) * static_cast<double>(f.ncols());
    NormValue nv;
    nv.raw = cost_rows <= cost_cols ? grid_power_rows_inner(f, k, l)
                                    : grid_power_rows_inner(transpose(f), l, k);
    nv.value = std::pow(std::abs(nv.raw), 1.0 / (static_cast<double>(k) * l));
    return nv;
}

double vs_inner_product(const std::vector<const FunctionTable2*>& fs,
                        const std::vector<const FunctionTable2*>& gs,
                        const std::vector<std::int64_t>& B,
                        const std::vector<std::int64_t>& Bprime) {
    if (fs.empty() || fs.size() != gs.size())
        throw std::invalid_argument("vs_inner_product: need matching r >= 1");
    if (B.empty() || Bprime.empty())
        throw std::invalid_argument("vs_inner_product: empty index set");
    const std::int64_t N = fs[0]->torus_modulus();
    for (const auto* t : fs)
        if (!t->is_full_torus(N))
            throw std::invalid_argument("vs_inner_product: full-torus tables required");
    for (const auto* t : gs)
        if (!t->is_full_torus(N))
            throw std::invalid_argument("vs_inner_product: full-torus tables required");

    const std::size_t r = fs.size(), nP = Bprime.size();
    // F_i(s,s') = E_{a in B', y in B} f_i(a, y+s) g_i(a, y+s').
    std::vector<std::vector<double>> F(r, std::vector<double>(nP * nP, 0.0));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t si = 0; si < nP; ++si) {
            for (std::size_t sj = 0; sj < nP; ++sj) {
                KahanSum s;
                for (std::int64_t a : Bprime)
                    for (std::int64_t y : B)
                        s.add(fs[i]->torus_at(a, y + Bprime[si]) *
                              gs[i]->torus_at(a, y + Bprime[sj]));
                F[i][si * nP + sj] =
                    s.value() / (static_cast<double>(nP) * static_cast<double>(B.size()));
            }
        }
    }
    KahanSum total;
    for (std::size_t si = 0; si < nP; ++si) {
        for (std::size_t sj = 0; sj < nP; ++sj) {
            double prod = 1.0;
            for (std::size_t i = 0; i < r; ++i) prod *= F[i][si * nP + sj];
            total.add(prod);
        }
    }
    return total.value() / (static_cast<double>(nP) * static_cast<double>(nP));
}

NormValue vs_norm(const FunctionTable2& f, int r,
                  const std::vector<std::int64_t>& B,
                  const std::vector<std::int64_t>& Bprime) {
    if (r < 1) throw std::invalid_argument("vs_norm: r must be >= 1");
    std::vector<const FunctionTable2*> slots(static_cast<std::size_t>(r), &f);
    NormValue nv;
    nv.raw = vs_inner_product(slots, slots, B, Bprime);
    nv.value = root_clamped(nv.raw, 2.0 * r);
    return nv;
}

FunctionTable2 vs_to_grid_lift(const FunctionTable2& f,
                               const std::vector<std::int64_t>& B,
                               const std::vector<std::int64_t>& Bprime) {
    const std::int64_t N = f.torus_modulus();
    if (!f.is_full_torus(N))
        throw std::invalid_argument("vs_to_grid_lift: full-torus table required");
    std::vector<std::int64_t> rows;  // row index encodes (a, y) as a*N + y
    rows.reserve(Bprime.size() * B.size());
    std::vector<double> vals;
    vals.reserve(Bprime.size() * B.size() * Bprime.size());
    for (std::int64_t a : Bprime)
        for (std::int64_t y : B) rows.push_back(a * N + y);
    for (std::int64_t a : Bprime)
        for (std::int64_t y : B)
            for (std::int64_t z : Bprime) vals.push_back(f.torus_at(a, y + z));
    return FunctionTable2(rows, Bprime, std::move(vals));
}

NormValue mc_vs_inner_product(const std::vector<const FunctionTable2*>& fs,
                              const std::vector<const FunctionTable2*>& gs,
                              const std::vector<std::int64_t>& B,
                              const std::vector<std::int64_t>& Bprime,
                              std::uint64_t samples, std::uint64_t seed) {
    if (fs.empty() || fs.size() != gs.size())
        throw std::invalid_argument("mc_vs_inner_product: need matching r >= 1");
    if (samples < 1) throw std::invalid_argument("mc: samples must be >= 1");
    const std::size_t r = fs.size();
    CounterRng rng(seed);
    KahanSum sum, sumsq;
    for (std::uint64_t it = 0; it < samples; ++it) {
        const std::int64_t s = Bprime[rng.next_below(Bprime.size())];
        const std::int64_t sp = Bprime[rng.next_below(Bprime.size())];
        double prod = 1.0;
        for (std::size_t i = 0; i < r; ++i) {
            const std::int64_t y = B[rng.next_below(B.size())];
            const std::int64_t a = Bprime[rng.next_below(Bprime.size())];
            prod *= fs[i]->torus_at(a, y + s) * gs[i]->torus_at(a, y + sp);
        }
        sum.add(prod);
        sumsq.add(prod * prod);
    }
    NormValue nv;
    nv.method = NormMethod::monte_carlo;
    nv.samples = samples;
    nv.seed = seed;
    const double n = static_cast<double>(samples);
    nv.raw = sum.value() / n;
    nv.value = nv.raw;
    const double var = std::max(0.0, sumsq.value() / n - nv.raw * nv.raw);
    nv.stderr_ = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return nv;
}

NormValue mc_grid_power(const FunctionTable2& f, int k, int l,
                        std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc: samples must be >= 1");
    CounterRng rng(seed);
    KahanSum sum, sumsq;
    std::vector<std::size_t> xs(static_cast<std::size_t>(k)),
        ys(static_cast<std::size_t>(l));
    for (std::uint64_t it = 0; it < samples; ++it) {
        for (auto& x : xs) x = rng.next_below(f.nrows());
        for (auto& y : ys) y = rng.next_below(f.ncols());
        double prod = 1.0;
        for (std::size_t i : xs)
            for (std::size_t j : ys) prod *= f.at(i, j);
        sum.add(prod);
        sumsq.add(prod * prod);
    }
    NormValue nv;
    nv.method = NormMethod::monte_carlo;
    nv.samples = samples;
    nv.seed = seed;
    const double n = static_cast<double>(samples);
    nv.raw = sum.value() / n;
    nv.value = nv.raw;
    const double var = std::max(0.0, sumsq.value() / n - nv.raw * nv.raw);
    nv.stderr_ = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return nv;
}

NormValue mc_km_power(const std::vector<double>& f, int r,
                      std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc: samples must be >= 1");
    const std::int64_t N = static_cast<std::int64_t>(f.size());
    CounterRng rng(seed);
    KahanSum sum, sumsq;
    for (std::uint64_t it = 0; it < samples; ++it) {
        const std::int64_t x = static_cast<std::int64_t>(rng.next_below(f.size()));
        const std::int64_t a1 = static_cast<std::int64_t>(rng.next_below(f.size()));
        const std::int64_t a2 = static_cast<std::int64_t>(rng.next_below(f.size()));
        double prod = 1.0;
        for (int i = 0; i < r; ++i) {
            const std::int64_t b = static_cast<std::int64_t>(rng.next_below(f.size()));
            prod *= f[static_cast<std::size_t>((x + a1 + b) % N)] *
                    f[static_cast<std::size_t>((x + a2 + b) % N)];
        }
        sum.add(prod);
        sumsq.add(prod * prod);
    }
    NormValue nv;
    nv.method = NormMethod::monte_carlo;
    nv.samples = samples;
    nv.seed = seed;
    const double n = static_cast<double>(samples);
    nv.raw = sum.value() / n;
    nv.value = nv.raw;
    const double var = std::max(0.0, sumsq.value() / n - nv.raw * nv.raw);
    nv.stderr_ = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return nv;
}

}  // namespace skewlab
