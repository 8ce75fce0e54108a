#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skewlab/domain.hpp"

namespace skewlab {

struct FrequencySet {
    std::int64_t N = 1;
    std::vector<std::int64_t> freqs;  // sorted residues in 0..N-1

    std::size_t rank() const { return freqs.size(); }
};

struct RegularityReport {
    bool regular = false;
    double worst_delta = 0.0;   // breakpoint with the smallest slack
    double worst_ratio = 0.0;   // |B_{1+delta}| / |B| at that breakpoint
    std::size_t breakpoints_checked = 0;
    std::string reason;
};

// Bohr set on Z/NZ: the residues x with t(x) <= rho, where
// t(x) = max_{r in Gamma} |e(rx/N) - 1| = max_r 2|sin(pi (rx mod N) / N)|.
// Immutable after construction.
class BohrSet {
public:
    // Membership ties (t(x) = rho within the guard band) resolve to inside.
    static constexpr double kGuard = 1e-12;

    BohrSet(FrequencySet freq, double radius);

    const FrequencySet& freq() const { return freq_; }
    std::int64_t modulus() const { return freq_.N; }
    std::size_t rank() const { return freq_.rank(); }
    double radius() const { return rho_; }
    const std::vector<std::int64_t>& elements() const { return elems_; }
    std::size_t size() const { return elems_.size(); }

    bool contains(std::int64_t x) const;

    // Critical value t(x) for residue x.
    double critical_value(std::int64_t x) const;

    // Bohr set on the same frequencies with radius delta * rho.
    BohrSet dilate(double delta) const;

    // Number of residues with t(x) <= rad (guarded <=) or t(x) < rad
    // (guarded <); the step function behind regularity certification.
    std::size_t count_within(double rad, bool strict = false) const;

private:
    FrequencySet freq_;
    double rho_ = 0.0;
    std::vector<double> tvals_;        // t(x) for every residue
    std::vector<std::int64_t> elems_;  // sorted
};

BohrSet build_bohr(std::int64_t N, std::vector<std::int64_t> freqs, double rho);

// Exact regularity certification via the breakpoints of the step function
// delta -> |B_{1+delta}|, checked at both one-sided limits of every
// breakpoint in [-1/(12d), 1/(12d)] plus the interval endpoints.
RegularityReport certify_regular(const BohrSet& B);

// A delta in [1/2, 1] whose dilate certifies regular; prefers radii at
// midpoints of consecutive critical values. Throws if the scan exhausts
// (Lemma-guaranteed existence makes that an implementation bug).
double find_regular_dilate(const BohrSet& B);

struct StructureReport {
    bool sumset_ok = false;
    bool doubling_ok = false;
    std::optional<std::int64_t> counterexample;  // sum escaping B_{d+d'}
    std::size_t b2_size = 0;
    double doubling_bound = 0.0;
};

// Checks B_delta + B_delta' subseteq B_{delta+delta'} elementwise and the
// doubling estimate |B_2| <= 6^d |B|.
StructureReport check_structure(const BohrSet& B, double delta, double delta_prime);

struct ChangeOfVarsResult {
    double gap = 0.0;
    double bound = 0.0;
    bool holds = false;
};

// Gap between the plain average of F over B^(1) x ... x B^(k) x Y_1 x ...
// x Y_l x Z_1 x ... x Z_m and the average after the transformation
// x_i -> x_i + sum_j nu_{ij} y_j, against the bound 50 rho k l d |nu|_inf.
// rho is the dilate fraction with every Y_j inside every B^(i)_rho.
ChangeOfVarsResult change_of_vars_gap(
    const std::function<double(const std::vector<std::int64_t>&)>& F,
    const std::vector<BohrSet>& bohrs,
    const std::vector<std::vector<std::int64_t>>& Ys,
    const std::vector<std::vector<std::int64_t>>& Zs,
    const std::vector<std::vector<std::int64_t>>& nu, double rho);

struct TranslateAverage {
    std::int64_t t = 0;
    double average = 0.0;
};

// First t in B_{1-lambda} (ascending residues) with t + S subseteq B and
// avg_{x in t+S} f(x) >= c - eps. f is indexed by residue (size N).
TranslateAverage translate_average(const std::vector<double>& f, const BohrSet& B,
                                   const std::vector<std::int64_t>& S,
                                   double lambda, double eps, double c);

}  // namespace skewlab
