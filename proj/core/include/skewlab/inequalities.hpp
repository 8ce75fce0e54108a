#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewlab/bohr.hpp"
#include "skewlab/table.hpp"

namespace skewlab {

struct InequalityVerdict {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;  // lhs <= rhs + 1e-9 * max(1, |rhs|)
    double slack = 0.0;  // rhs - lhs
    std::string instance_digest;

    static InequalityVerdict of(double lhs, double rhs, std::string digest = "");
};

// Gowers-Holder (i): |<f_1..f_r, g_1..g_r>|^r <= prod_i <f_i..f_i, g_i..g_i>;
// r must be even.
InequalityVerdict check_gowers_holder_i(const std::vector<const FunctionTable2*>& fs,
                                        const std::vector<const FunctionTable2*>& gs,
                                        const std::vector<std::int64_t>& B,
                                        const std::vector<std::int64_t>& Bprime);

// Gowers-Holder (ii): |<f,g>|^2 <= <f,f> <g,g>; any r >= 1.
InequalityVerdict check_gowers_holder_ii(const std::vector<const FunctionTable2*>& fs,
                                         const std::vector<const FunctionTable2*>& gs,
                                         const std::vector<std::int64_t>& B,
                                         const std::vector<std::int64_t>& Bprime);

// Grid Gowers-Cauchy-Schwarz: |E prod f_ij(x_i,y_j)| <= prod ||f_ij||_{U_{k,l}}
// for a k x l matrix of tables; k, l even.
InequalityVerdict check_grid_gcs(
    const std::vector<std::vector<const FunctionTable2*>>& f_matrix);

// Binomial lemma in exact rational arithmetic:
// sum_{d even, r <= d <= r'} C(r',d) eps^d >= (1 + eps/2)^{r'}
// whenever r' >= 2 eps^{-1} r. eps is given as eps_num/eps_den.
InequalityVerdict binomial_sum_check(int r, int r_prime, std::int64_t eps_num,
                                     std::int64_t eps_den);

// AP3 control: |E_{x,a} f1(x) f2(x+a) f3(x+2a)| <= ||f3||_{U^2}; odd N only.
InequalityVerdict check_u2_control(const std::vector<double>& f1,
                                   const std::vector<double>& f2,
                                   const std::vector<double>& f3);

// The two skew-corner control bounds from the introductory sketch; reported
// as soft verdicts (the derivation is schematic, normalizations unpinned).
struct SkewControlReport {
    double lambda = 0.0;  // the counting form
    InequalityVerdict via_f1_u2;   // |lam| <= ||f1||_dir ||f3||_{U^2(GxG)}
    InequalityVerdict via_f2_u2;   // |lam| <= ||f2||_dir ||f3||_{U^2(GxG)}
    InequalityVerdict via_f1_f2;   // |lam| <= ||f1||_dir ||f2||_dir
};

SkewControlReport check_skew_control(const FunctionTable2& f1,
                                     const FunctionTable2& f2,
                                     const FunctionTable2& f3);

// Instance for the almost-periodicity conclusion checker.
struct ApInstance {
    BohrSet B1;                       // ambient of Y
    BohrSet B2;                       // ambient of Z
    std::vector<std::int64_t> Y, Z, D;
    double eps = 0.0;

    double beta() const {
        return static_cast<double>(Y.size()) / static_cast<double>(B1.size());
    }
    double gamma() const {
        return static_cast<double>(Z.size()) / static_cast<double>(B2.size());
    }
};

// lhs = |E_{b in B', y in B1, z in B2} 1_D(z-y+b) 1_Y(y) 1_Z(z)
//        - E_{y,z} 1_D(z-y) 1_Y(y) 1_Z(z)|, rhs = eps beta gamma.
InequalityVerdict ap_conclusion_check(const ApInstance& inst, const BohrSet& Bprime);

// Empirical finder (not the theorem's proof): first regular B' contained in
// inst.B2 over frequency sets of rank <= max_rank and the given radius grid
// that passes ap_conclusion_check.
std::optional<BohrSet> ap_search(const ApInstance& inst, int max_rank,
                                 const std::vector<double>& radius_grid);

}  // namespace skewlab
