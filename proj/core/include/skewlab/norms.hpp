#pragma once

#include <cstdint>
#include <vector>

#include "skewlab/point_set.hpp"
#include "skewlab/table.hpp"

namespace skewlab {

// Per-column relative densities vd(x) = avg_{y in B} 1_A(x,y), stored on
// the full residue range (0 outside X), together with the overall density
// alpha of A in X x B and delta = |X|/|B|.
struct ColumnDensityTable {
    std::int64_t N = 1;
    std::vector<double> vd;  // size N
    double alpha = 0.0;
    double delta = 0.0;
};

// bal(x,y) = 1_A(x,y) - vd(x), stored on the full torus.
struct BalancedTable {
    FunctionTable2 bal;
    ColumnDensityTable density;
};

ColumnDensityTable column_density(const PointSet2& A,
                                  const std::vector<std::int64_t>& X,
                                  const std::vector<std::int64_t>& B);

BalancedTable balanced(const PointSet2& A, const std::vector<std::int64_t>& X,
                       const std::vector<std::int64_t>& B);

// U^2 uniformity norm of a 1-D table on Z/NZ, via E_a (E_x f(x)f(x+a))^2.
NormValue u2_norm(const std::vector<double>& f);

// Kelley-Meka norm (E_{x,a1,a2,b1..br} prod_i f(x+a1+b_i) f(x+a2+b_i))^{1/2r},
// computed as E_d (E_x f(x)f(x+d))^r; r = 2 coincides with u2_norm.
NormValue km_norm(const std::vector<double>& f, int r);

// Raw directional average E_{x,a1 in H1,a2 in H2} f(x)f(x+a1)f(x+a2)f(x+a1+a2)
// over (Z/NZ)^2. H1, H2 must contain 0 and be closed under negation.
// The 1/4-root is exposed in NormValue.value when the raw value is >= 0;
// otherwise value carries the signed raw average.
NormValue directional_norm_raw(const FunctionTable2& f,
                               const std::vector<Point2>& H1,
                               const std::vector<Point2>& H2);

// Convenience: all of (Z/NZ)^2 as a derivative group, and {0} x Z/NZ.
std::vector<Point2> full_group2(std::int64_t N);
std::vector<Point2> vertical_group2(std::int64_t N);

// Grid norm |E prod f(x_i,y_j)|^{1/kl} for even k, l; evaluated through the
// cheaper of the two nested-power factorizations.
NormValue grid_norm(const FunctionTable2& f, int k, int l);

// Vertical segments Gowers inner product
// E_{y_i in B, a_i, s, s' in B'} prod_i f_i(a_i, y_i+s) g_i(a_i, y_i+s'),
// via the factorization E_{s,s'} prod_i F_i(s,s').
double vs_inner_product(const std::vector<const FunctionTable2*>& fs,
                        const std::vector<const FunctionTable2*>& gs,
                        const std::vector<std::int64_t>& B,
                        const std::vector<std::int64_t>& Bprime);

// ||f||_{VS_r(B,B')}: 2r copies of f, rooted.
NormValue vs_norm(const FunctionTable2& f, int r,
                  const std::vector<std::int64_t>& B,
                  const std::vector<std::int64_t>& Bprime);

// Lift F((a,y), z) = f(a, y+z) on (B' x B) x B'; for even r,
// ||f||_{VS_r(B,B')} = ||F||_{U_{r,2}}.
FunctionTable2 vs_to_grid_lift(const FunctionTable2& f,
                               const std::vector<std::int64_t>& B,
                               const std::vector<std::int64_t>& Bprime);

// Seeded Monte Carlo estimators of the raw (pre-root) averages. value and
// raw carry the unbiased sample mean of the integrand.
NormValue mc_vs_inner_product(const std::vector<const FunctionTable2*>& fs,
                              const std::vector<const FunctionTable2*>& gs,
                              const std::vector<std::int64_t>& B,
                              const std::vector<std::int64_t>& Bprime,
                              std::uint64_t samples, std::uint64_t seed);

NormValue mc_grid_power(const FunctionTable2& f, int k, int l,
                        std::uint64_t samples, std::uint64_t seed);

NormValue mc_km_power(const std::vector<double>& f, int r,
                      std::uint64_t samples, std::uint64_t seed);

}  // namespace skewlab
