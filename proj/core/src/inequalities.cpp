#include "skewlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "skewlab/kahan.hpp"
#include "skewlab/norms.hpp"

namespace skewlab {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt out = 1;
    for (int i = 0; i < k; ++i) {
        out *= n - i;
        out /= i + 1;
    }
    return out;
}

}  // namespace

InequalityVerdict InequalityVerdict::of(double lhs, double rhs, std::string digest) {
    InequalityVerdict v;
    v.lhs = lhs;
    v.rhs = rhs;
    v.slack = rhs - lhs;
    v.holds = lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
    v.instance_digest = std::move(digest);
    return v;
}

InequalityVerdict check_gowers_holder_i(const std::vector<const FunctionTable2*>& fs,
                                        const std::vector<const FunctionTable2*>& gs,
                                        const std::vector<std::int64_t>& B,
                                        const std::vector<std::int64_t>& Bprime) {
    if (fs.size() != gs.size()) throw std::invalid_argument("fs/gs length mismatch");
    const int r = static_cast<int>(fs.size());
    if (r < 2 || r % 2 != 0) throw std::invalid_argument("gowers_holder_i needs even r");

    const double ip = vs_inner_product(fs, gs, B, Bprime);
    const double lhs = std::pow(std::abs(ip), r);

    double rhs = 1.0;
    for (int i = 0; i < r; ++i) {
        std::vector<const FunctionTable2*> fi(r, fs[i]), gi(r, gs[i]);
        rhs *= vs_inner_product(fi, gi, B, Bprime);
    }

    std::ostringstream dig;
    dig << "gh_i r=" << r << " |B|=" << B.size() << " |B'|=" << Bprime.size();
    return InequalityVerdict::of(lhs, rhs, dig.str());
}

InequalityVerdict check_gowers_holder_ii(const std::vector<const FunctionTable2*>& fs,
                                         const std::vector<const FunctionTable2*>& gs,
                                         const std::vector<std::int64_t>& B,
                                         const std::vector<std::int64_t>& Bprime) {
    if (fs.size() != gs.size()) throw std::invalid_argument("fs/gs length mismatch");
    const int r = static_cast<int>(fs.size());
    if (r < 1) throw std::invalid_argument("gowers_holder_ii needs r >= 1");

    const double ip = vs_inner_product(fs, gs, B, Bprime);
    const double lhs = ip * ip;
    const double rhs = vs_inner_product(fs, fs, B, Bprime) *
                       vs_inner_product(gs, gs, B, Bprime);

    std::ostringstream dig;
    dig << "gh_ii r=" << r << " |B|=" << B.size() << " |B'|=" << Bprime.size();
    return InequalityVerdict::of(lhs, rhs, dig.str());
}

InequalityVerdict check_grid_gcs(
    const std::vector<std::vector<const FunctionTable2*>>& f_matrix) {
    const int k = static_cast<int>(f_matrix.size());
    if (k == 0 || k % 2 != 0) throw std::invalid_argument("grid_gcs needs even k");
    const int l = static_cast<int>(f_matrix[0].size());
    if (l == 0 || l % 2 != 0) throw std::invalid_argument("grid_gcs needs even l");

    const auto& I = f_matrix[0][0]->rows();
    const auto& J = f_matrix[0][0]->cols();
    for (const auto& row : f_matrix) {
        if (static_cast<int>(row.size()) != l)
            throw std::invalid_argument("grid_gcs matrix not rectangular");
        for (const auto* f : row)
            if (f->rows() != I || f->cols() != J)
                throw std::invalid_argument("grid_gcs tables on mismatched index sets");
    }

    const std::size_t nI = I.size(), nJ = J.size();
    // E_{x_i, y_j} prod_{ij} f_ij(x_i, y_j)
    //   = E_{y_1..y_l} prod_i E_x prod_j f_ij(x, y_j).
    std::vector<std::size_t> ytup(l, 0);
    KahanSum outer;
    while (true) {
        double rowprod = 1.0;
        for (int i = 0; i < k; ++i) {
            KahanSum inner;
            for (std::size_t xi = 0; xi < nI; ++xi) {
                double p = 1.0;
                for (int j = 0; j < l; ++j) p *= f_matrix[i][j]->at(xi, ytup[j]);
                inner.add(p);
            }
            rowprod *= inner.value() / static_cast<double>(nI);
        }
        outer.add(rowprod);
        int pos = l - 1;
        while (pos >= 0 && ++ytup[pos] == nJ) ytup[pos--] = 0;
        if (pos < 0) break;
    }
    double total = outer.value();
    for (int j = 0; j < l; ++j) total /= static_cast<double>(nJ);
    const double lhs = std::abs(total);

    double rhs = 1.0;
    for (const auto& row : f_matrix)
        for (const auto* f : row) rhs *= grid_norm(*f, k, l).value;

    std::ostringstream dig;
    dig << "grid_gcs k=" << k << " l=" << l << " I=" << nI << " J=" << nJ;
    return InequalityVerdict::of(lhs, rhs, dig.str());
}

InequalityVerdict binomial_sum_check(int r, int r_prime, std::int64_t eps_num,
                                     std::int64_t eps_den) {
    if (r < 1 || r_prime < r) throw std::invalid_argument("need r' >= r >= 1");
    if (eps_num <= 0 || eps_den <= 0) throw std::invalid_argument("need eps > 0");

    const Rational eps(eps_num, eps_den);

    Rational rhs = 0;
    int start = r + (r % 2);  // smallest even d with d >= r
    for (int d = start; d <= r_prime; d += 2) {
        Rational term = Rational(binomial(r_prime, d));
        for (int i = 0; i < d; ++i) term *= eps;
        rhs += term;
    }

    Rational base = 1 + eps / 2;
    Rational lhs = 1;
    for (int i = 0; i < r_prime; ++i) lhs *= base;

    const bool hypothesis = Rational(r_prime) * eps >= Rational(2 * r);

    InequalityVerdict v;
    v.lhs = static_cast<double>(lhs);
    v.rhs = static_cast<double>(rhs);
    v.slack = v.rhs - v.lhs;
    v.holds = !hypothesis || rhs >= lhs;  // exact rational comparison
    std::ostringstream dig;
    dig << "binomial r=" << r << " r'=" << r_prime << " eps=" << eps_num << "/"
        << eps_den << (hypothesis ? "" : " (hypothesis r' >= 2/eps r not met)");
    v.instance_digest = dig.str();
    return v;
}

InequalityVerdict check_u2_control(const std::vector<double>& f1,
                                   const std::vector<double>& f2,
                                   const std::vector<double>& f3) {
    const std::int64_t N = static_cast<std::int64_t>(f1.size());
    if (N == 0 || f2.size() != f1.size() || f3.size() != f1.size())
        throw std::invalid_argument("u2_control tables must share a modulus");
    if (N % 2 == 0)
        throw std::invalid_argument("u2_control needs odd N (2 must be invertible)");

    KahanSum sum;
    for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t a = 0; a < N; ++a)
            sum.add(f1[x] * f2[(x + a) % N] * f3[(x + 2 * a) % N]);
    const double lhs = std::abs(sum.value() / static_cast<double>(N * N));
    const double rhs = u2_norm(f3).value;

    std::ostringstream dig;
    dig << "u2_control N=" << N;
    return InequalityVerdict::of(lhs, rhs, dig.str());
}

SkewControlReport check_skew_control(const FunctionTable2& f1,
                                     const FunctionTable2& f2,
                                     const FunctionTable2& f3) {
    const std::int64_t N = f1.torus_modulus();
    if (f2.torus_modulus() != N || f3.torus_modulus() != N)
        throw std::invalid_argument("skew_control tables must share a torus");

    // Lambda = E_{x,y,a,y'} f1(x,y) f2(x,y+a) f3(x+a,y'),
    // factorized through the y' average of f3.
    std::vector<double> f3col(N, 0.0);
    for (std::int64_t x = 0; x < N; ++x) {
        KahanSum s;
        for (std::int64_t yp = 0; yp < N; ++yp) s.add(f3.torus_at(x, yp));
        f3col[x] = s.value() / static_cast<double>(N);
    }
    KahanSum lam;
    for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t a = 0; a < N; ++a) {
            KahanSum inner;
            for (std::int64_t y = 0; y < N; ++y)
                inner.add(f1.torus_at(x, y) * f2.torus_at(x, y + a));
            lam.add(inner.value() / static_cast<double>(N) * f3col[(x + a) % N]);
        }
    const double lambda = lam.value() / static_cast<double>(N * N);

    const auto H_full = full_group2(N);
    const auto H_vert = vertical_group2(N);
    auto dir_val = [&](const FunctionTable2& f) {
        const NormValue nv = directional_norm_raw(f, H_full, H_vert);
        return nv.raw >= 0 ? nv.value : 0.0;
    };
    const NormValue u2_2d = directional_norm_raw(f3, H_full, H_full);
    const double f3_u2 = u2_2d.raw >= 0 ? u2_2d.value : 0.0;

    const double d1 = dir_val(f1);
    const double d2 = dir_val(f2);

    SkewControlReport rep;
    rep.lambda = lambda;
    rep.via_f1_u2 = InequalityVerdict::of(std::abs(lambda), d1 * f3_u2, "skew f1*u2");
    rep.via_f2_u2 = InequalityVerdict::of(std::abs(lambda), d2 * f3_u2, "skew f2*u2");
    rep.via_f1_f2 = InequalityVerdict::of(std::abs(lambda), d1 * d2, "skew f1*f2");
    return rep;
}

InequalityVerdict ap_conclusion_check(const ApInstance& inst, const BohrSet& Bprime) {
    if (inst.Y.empty() || inst.Z.empty())
        throw std::invalid_argument("ap_conclusion_check needs nonempty Y, Z");
    const std::int64_t N = inst.B1.modulus();
    if (inst.B2.modulus() != N || Bprime.modulus() != N)
        throw std::invalid_argument("ap instance moduli mismatch");

    std::vector<char> inD(N, 0);
    for (std::int64_t d : inst.D) inD[((d % N) + N) % N] = 1;

    const auto& bs = Bprime.elements();
    KahanSum shifted, plain;
    for (std::int64_t y : inst.Y)
        for (std::int64_t z : inst.Z) {
            const std::int64_t diff = ((z - y) % N + N) % N;
            plain.add(inD[diff]);
            std::int64_t hits = 0;
            for (std::int64_t b : bs) hits += inD[(diff + b) % N];
            shifted.add(static_cast<double>(hits) / static_cast<double>(bs.size()));
        }
    const double scale =
        static_cast<double>(inst.B1.size()) * static_cast<double>(inst.B2.size());
    const double lhs = std::abs((shifted.value() - plain.value()) / scale);
    const double rhs = inst.eps * inst.beta() * inst.gamma();

    std::ostringstream dig;
    dig << "ap N=" << N << " |Y|=" << inst.Y.size() << " |Z|=" << inst.Z.size()
        << " |D|=" << inst.D.size() << " |B'|=" << bs.size();
    return InequalityVerdict::of(lhs, rhs, dig.str());
}

std::optional<BohrSet> ap_search(const ApInstance& inst, int max_rank,
                                 const std::vector<double>& radius_grid) {
    if (max_rank < 1) throw std::invalid_argument("ap_search needs max_rank >= 1");
    const std::int64_t N = inst.B2.modulus();

    std::vector<char> inB2(N, 0);
    for (std::int64_t x : inst.B2.elements()) inB2[x] = 1;

    // Lexicographic scan over frequency subsets of {1..N-1} of each rank.
    std::vector<std::int64_t> combo;
    auto try_candidate = [&](const std::vector<std::int64_t>& freqs,
                             double rho) -> std::optional<BohrSet> {
        BohrSet cand = build_bohr(N, freqs, rho);
        BohrSet reg = cand.dilate(find_regular_dilate(cand));
        for (std::int64_t x : reg.elements())
            if (!inB2[x]) return std::nullopt;
        if (ap_conclusion_check(inst, reg).holds) return reg;
        return std::nullopt;
    };

    std::function<std::optional<BohrSet>(int, std::int64_t)> rec =
        [&](int depth, std::int64_t from) -> std::optional<BohrSet> {
        if (depth == 0) {
            for (double rho : radius_grid)
                if (auto hit = try_candidate(combo, rho)) return hit;
            return std::nullopt;
        }
        for (std::int64_t f = from; f < N; ++f) {
            combo.push_back(f);
            if (auto hit = rec(depth - 1, f + 1)) return hit;
            combo.pop_back();
        }
        return std::nullopt;
    };

    for (int rank = 1; rank <= max_rank; ++rank) {
        combo.clear();
        if (auto hit = rec(rank, 1)) return hit;
    }
    return std::nullopt;
}

}  // namespace skewlab
