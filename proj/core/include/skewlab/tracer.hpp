#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skewlab/bohr.hpp"
#include "skewlab/detect.hpp"
#include "skewlab/point_set.hpp"

namespace skewlab {

// Tunable constants and dilate scales of the density increment step.
// Fields left unset are derived from (alpha, delta, d) by the formulas of
// the argument; overridden() lists every departure from those defaults.
struct IncrementConstants {
    double c1 = 0x1p-13;
    double c2 = 0x1p-14;
    double c3 = 0x1p-12;
    double C = 1.0;  // the absolute constant, configurable; desk default 1

    std::optional<std::int64_t> r, r_prime;  // even; default r = 2 ceil(log2(2/delta)) + 2^30
    std::optional<double> kappa, lambda, mu, nu, mu0;

    bool assume_corner_free = false;  // skip the skew-corner short-circuit
    bool random_subset_y = false;     // Step 5: seeded random Y' instead of greedy
    std::uint64_t seed = 0;
    int ap_max_rank = 1;
    std::vector<double> ap_radius_grid;  // absolute radii tried by ap_search

    std::vector<std::string> overridden() const;
};

// Scales materialized for a concrete (alpha, delta, d) instance.
struct ResolvedScales {
    std::int64_t r = 0, r_prime = 0;
    double kappa = 0.0, mu0 = 0.0;
    double mu = 0.0, nu = 0.0;  // chosen regular dilate scales (set by steps)
};

ResolvedScales resolve_scales(const IncrementConstants& consts, double alpha,
                              double delta, std::size_t d);

// Every tracer inequality is phrased as lhs >= rhs;
// holds <=> lhs >= rhs - 1e-9 * max(1, |rhs|).
struct Verdict {
    std::string name;
    double lhs = 0.0, rhs = 0.0;
    bool holds = false;
    bool hard = false;  // hard verdicts are unconditional mathematics
};

struct StepReport {
    std::string step;
    std::map<std::string, double> measured;
    std::map<std::string, std::int64_t> witnesses;
    std::vector<Verdict> verdicts;

    void measure(const std::string& k, double v) { measured[k] = v; }
    void witness(const std::string& k, std::int64_t v) { witnesses[k] = v; }
    Verdict& check(const std::string& name, double lhs, double rhs, bool hard);
    bool all_hard_hold() const;
};

enum class OutcomeKind {
    DensityIncrement,
    Step1ColumnIncrement,
    SmallnessViolation,
    SkewCornerPresent,
    ChainBreak,
};

std::string outcome_kind_name(OutcomeKind k);

struct IncrementOutcome {
    OutcomeKind kind = OutcomeKind::ChainBreak;
    std::string detail;
    std::vector<StepReport> reports;

    // DensityIncrement payload.
    std::optional<BohrSet> Bprime;
    std::int64_t x_translate = 0;  // t0: horizontal translate of B'
    std::int64_t y_translate = 0;  // w0: vertical translate of B'
    double base_alpha = 0.0;
    double final_density = 0.0;
    std::int64_t x_section_size = 0;  // |X-tilde''|

    // Step1ColumnIncrement payload: the dense column set.
    std::vector<std::int64_t> column_set;
    std::optional<SkewCornerWitness> corner;
};

// Shared state threaded through the steps. A is given as a residue-indexed
// indicator on (Z/NZ)^2, X as a subset of B's elements.
struct TraceInput {
    PointSet2 A;  // cyclic domain
    std::vector<std::int64_t> X;
    BohrSet B;
};

struct Step1Result {
    StepReport report;
    bool column_increment = false;
    std::vector<std::int64_t> X1;     // on column increment
    std::vector<std::int64_t> X_out;  // regularized X, already shifted by -t
    double lambda = 1.0;
    std::int64_t t = 0;
};

struct Step2Result {
    StepReport report;
    std::int64_t x0 = 0, s0 = 0, t0 = 0;
    double delta_mu = 0.0;
    double vs_power = 0.0;  // ||T_{(x0,0)} bal||_{VS_r}^{2r}
    double mu = 0.0, lambda = 1.0;
};

struct Step4Result {
    StepReport report;
    std::int64_t yprime0 = 0;
    std::vector<std::int64_t> D, Y, Z;
    std::vector<std::int64_t> a_vec, t_vec;
    double beta = 0.0, gamma = 0.0;
    double nu = 0.0;
};

struct Step5Result {
    StepReport report;
    bool chain_break = false;
    std::optional<BohrSet> Bprime;
    std::vector<std::int64_t> Y;  // possibly shrunk
    double beta = 0.0;
};

Step1Result step1_regularize(const TraceInput& in, const IncrementConstants& consts);

StepReport claim_bounds(const TraceInput& in, double lambda, double mu);

Step2Result step2_imbalance(const TraceInput& in, const Step1Result& s1,
                            const IncrementConstants& consts);

StepReport step3_unbalance(const TraceInput& in, const Step2Result& s2,
                           const IncrementConstants& consts);

Step4Result step4_sift(const TraceInput& in, const Step2Result& s2,
                       const IncrementConstants& consts);

Step5Result step5_ap(const TraceInput& in, const Step2Result& s2,
                     const Step4Result& s4, const IncrementConstants& consts);

IncrementOutcome step6_complete(const TraceInput& in, const Step2Result& s2,
                                const Step4Result& s4, const Step5Result& s5,
                                const IncrementConstants& consts);

IncrementOutcome run_increment(const TraceInput& in, const IncrementConstants& consts);

struct IterationEntry {
    int i = 0;
    double delta = 0.0;
    std::size_t rank = 0;
    double radius = 0.0;
    double alpha = 0.0;
    OutcomeKind outcome = OutcomeKind::ChainBreak;
    std::vector<Verdict> bullet_checks;
};

struct IterationLog {
    std::vector<IterationEntry> entries;
    std::vector<IncrementOutcome> outcomes;
};

// Nine-box passage from [N]x[N] to (Z/NZ)^2, then repeated run_increment
// with the (delta_i, d_i, rho_i) bookkeeping; stops at the first
// non-increment outcome or after max_steps.
IterationLog iterate_theorem(const PointSet2& A, const IncrementConstants& consts,
                             int max_steps = 8);

}  // namespace skewlab
