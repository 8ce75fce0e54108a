#include "skewlab/bohr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "skewlab/kahan.hpp"

namespace skewlab {

BohrSet::BohrSet(FrequencySet freq, double radius)
    : freq_(std::move(freq)), rho_(radius) {
    if (freq_.N < 1) throw std::invalid_argument("BohrSet: N must be >= 1");
    if (rho_ < 0) throw std::invalid_argument("BohrSet: radius must be >= 0");
    std::sort(freq_.freqs.begin(), freq_.freqs.end());
    freq_.freqs.erase(std::unique(freq_.freqs.begin(), freq_.freqs.end()),
                      freq_.freqs.end());
    for (std::int64_t r : freq_.freqs)
        if (r < 0 || r >= freq_.N)
            throw std::invalid_argument("BohrSet: frequency out of 0..N-1");

    const std::int64_t N = freq_.N;
    tvals_.assign(static_cast<std::size_t>(N), 0.0);
    for (std::int64_t x = 0; x < N; ++x) {
        double t = 0.0;
        for (std::int64_t r : freq_.freqs) {
            const std::int64_t rx = (r * x) % N;
            t = std::max(t, 2.0 * std::abs(std::sin(
                                std::numbers::pi * static_cast<double>(rx) /
                                static_cast<double>(N))));
        }
        tvals_[static_cast<std::size_t>(x)] = t;
        if (t <= rho_ + kGuard) elems_.push_back(x);
    }
}

bool BohrSet::contains(std::int64_t x) const {
    x %= freq_.N;
    if (x < 0) x += freq_.N;
    return tvals_[static_cast<std::size_t>(x)] <= rho_ + kGuard;
}

double BohrSet::critical_value(std::int64_t x) const {
    x %= freq_.N;
    if (x < 0) x += freq_.N;
    return tvals_[static_cast<std::size_t>(x)];
}

BohrSet BohrSet::dilate(double delta) const {
    if (delta < 0) throw std::invalid_argument("dilate: delta must be >= 0");
    return BohrSet(freq_, delta * rho_);
}

std::size_t BohrSet::count_within(double rad, bool strict) const {
    std::size_t c = 0;
    for (double t : tvals_) {
        if (strict ? (t < rad - kGuard) : (t <= rad + kGuard)) ++c;
    }
    return c;
}

BohrSet build_bohr(std::int64_t N, std::vector<std::int64_t> freqs, double rho) {
    return BohrSet(FrequencySet{N, std::move(freqs)}, rho);
}

RegularityReport certify_regular(const BohrSet& B) {
    RegularityReport rep;
    const std::size_t d = B.rank();
    if (d == 0) {  // full group: ratio identically 1
        rep.regular = true;
        rep.worst_ratio = 1.0;
        rep.reason = "rank 0: regular by convention";
        return rep;
    }
    if (B.radius() <= 0.0) {
        rep.regular = false;
        rep.reason = "rho = 0 with nonzero rank: ratio growth undefined";
        return rep;
    }

    const double rho = B.radius();
    const double window = 1.0 / (12.0 * static_cast<double>(d));
    const double n0 = static_cast<double>(B.size());

    // |B_{1+delta}| jumps only at delta = t(x)/rho - 1; checking both
    // one-sided limits at every breakpoint in the window (plus the window
    // endpoints) decides the continuum condition exactly.
    std::set<double> candidates = {-window, window, 0.0};
    for (std::int64_t x = 0; x < B.modulus(); ++x) {
        const double delta = B.critical_value(x) / rho - 1.0;
        if (std::abs(delta) <= window) candidates.insert(delta);
    }

    rep.regular = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (double delta : candidates) {
        ++rep.breakpoints_checked;
        const double rad = (1.0 + delta) * rho;
        const double lo = 1.0 - 12.0 * static_cast<double>(d) * std::abs(delta);
        const double hi = 1.0 + 12.0 * static_cast<double>(d) * std::abs(delta);
        for (bool strict : {false, true}) {
            const double ratio =
                static_cast<double>(B.count_within(rad, strict)) / n0;
            const double slack = std::min(hi - ratio, ratio - lo);
            if (slack < worst_slack) {
                worst_slack = slack;
                rep.worst_delta = delta;
                rep.worst_ratio = ratio;
            }
            if (ratio < lo - 1e-12 || ratio > hi + 1e-12) {
                rep.regular = false;
                rep.reason = "two-sided bound violated at breakpoint";
            }
        }
    }
    return rep;
}

double find_regular_dilate(const BohrSet& B) {
    const double rho = B.radius();
    const std::int64_t N = B.modulus();
    if (B.rank() == 0 || rho == 0.0) return 1.0;

    const double lo = rho / 2.0, hi = rho;
    std::vector<double> crit;
    for (std::int64_t x = 0; x < N; ++x) {
        const double t = B.critical_value(x);
        if (t >= lo && t <= hi) crit.push_back(t);
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

    std::vector<double> candidates;
    // Midpoints between consecutive critical values first: the element set
    // is locally constant there, so the certificate is robust.
    std::vector<double> fence = {lo};
    fence.insert(fence.end(), crit.begin(), crit.end());
    fence.push_back(hi);
    for (std::size_t i = 0; i + 1 < fence.size(); ++i)
        candidates.push_back(0.5 * (fence[i] + fence[i + 1]));
    candidates.insert(candidates.end(), crit.begin(), crit.end());
    candidates.push_back(hi);
    candidates.push_back(lo);
    for (int grid : {64, 256, 1024}) {
        for (int i = 0; i <= grid; ++i)
            candidates.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                          static_cast<double>(grid));
    }

    for (double rad : candidates) {
        if (certify_regular(BohrSet(B.freq(), rad)).regular) return rad / rho;
    }
    throw std::runtime_error(
        "find_regular_dilate: exhausted " + std::to_string(candidates.size()) +
        " candidate radii without a regular dilate (implementation bug)");
}

StructureReport check_structure(const BohrSet& B, double delta, double delta_prime) {
    if (delta < 0 || delta_prime < 0)
        throw std::invalid_argument("check_structure: dilate scales must be >= 0");
    StructureReport rep;
    const std::int64_t N = B.modulus();
    const BohrSet Bd = B.dilate(delta);
    const BohrSet Bdp = B.dilate(delta_prime);
    const BohrSet Bsum = B.dilate(delta + delta_prime);

    rep.sumset_ok = true;
    for (std::int64_t a : Bd.elements()) {
        for (std::int64_t b : Bdp.elements()) {
            const std::int64_t s = (a + b) % N;
            if (!Bsum.contains(s)) {
                rep.sumset_ok = false;
                rep.counterexample = s;
                break;
            }
        }
        if (!rep.sumset_ok) break;
    }

    const BohrSet B2 = B.dilate(2.0);
    rep.b2_size = B2.size();
    rep.doubling_bound =
        std::pow(6.0, static_cast<double>(B.rank())) * static_cast<double>(B.size());
    rep.doubling_ok = static_cast<double>(rep.b2_size) <= rep.doubling_bound + 1e-9;
    return rep;
}

namespace {

// Iterates F over the cartesian product of index lists, averaging with a
// fixed-order compensated sum; `shift` adds sum_j nu_ij y_j to each x_i.
double product_average(
    const std::function<double(const std::vector<std::int64_t>&)>& F,
    const std::vector<const std::vector<std::int64_t>*>& sets, std::int64_t N,
    const std::vector<std::vector<std::int64_t>>* nu, std::size_t k,
    std::size_t l) {
    std::vector<std::size_t> idx(sets.size(), 0);
    std::vector<std::int64_t> args(sets.size(), 0);
    KahanSum sum;
    std::uint64_t count = 0;
    while (true) {
        for (std::size_t i = 0; i < sets.size(); ++i) args[i] = (*sets[i])[idx[i]];
        if (nu) {
            for (std::size_t i = 0; i < k; ++i) {
                std::int64_t v = args[i];
                for (std::size_t j = 0; j < l; ++j) v += (*nu)[i][j] * args[k + j];
                v %= N;
                if (v < 0) v += N;
                args[i] = v;
            }
        }
        const double val = F(args);
        if (std::abs(val) > 1.0 + 1e-9)
            throw std::invalid_argument("change_of_vars_gap: |F| must be <= 1");
        sum.add(val);
        ++count;
        std::size_t pos = sets.size();
        while (pos > 0) {
            --pos;
            if (++idx[pos] < sets[pos]->size()) break;
            idx[pos] = 0;
            if (pos == 0) return sum.value() / static_cast<double>(count);
        }
    }
}

}  // namespace

ChangeOfVarsResult change_of_vars_gap(
    const std::function<double(const std::vector<std::int64_t>&)>& F,
    const std::vector<BohrSet>& bohrs,
    const std::vector<std::vector<std::int64_t>>& Ys,
    const std::vector<std::vector<std::int64_t>>& Zs,
    const std::vector<std::vector<std::int64_t>>& nu, double rho) {
    const std::size_t k = bohrs.size(), l = Ys.size(), m = Zs.size();
    if (k == 0) throw std::invalid_argument("change_of_vars_gap: need k >= 1");
    if (nu.size() != k)
        throw std::invalid_argument("change_of_vars_gap: nu must be k x l");
    const std::int64_t N = bohrs[0].modulus();

    std::size_t d = 0;
    for (const auto& B : bohrs) {
        if (B.modulus() != N)
            throw std::invalid_argument("change_of_vars_gap: modulus mismatch");
        if (!certify_regular(B).regular)
            throw std::invalid_argument("change_of_vars_gap: Bohr set not regular");
        d = std::max(d, B.rank());
        const BohrSet Brho = B.dilate(rho);
        for (const auto& Y : Ys) {
            if (Y.empty())
                throw std::invalid_argument("change_of_vars_gap: empty Y set");
            for (std::int64_t y : Y)
                if (!Brho.contains(y))
                    throw std::invalid_argument(
                        "change_of_vars_gap: Y not inside the rho-dilate");
        }
    }

    std::int64_t nu_inf = 0;
    for (const auto& row : nu) {
        if (row.size() != l)
            throw std::invalid_argument("change_of_vars_gap: nu must be k x l");
        for (std::int64_t v : row) nu_inf = std::max(nu_inf, std::abs(v));
    }

    std::vector<const std::vector<std::int64_t>*> sets;
    for (const auto& B : bohrs) sets.push_back(&B.elements());
    for (const auto& Y : Ys) sets.push_back(&Y);
    for (const auto& Z : Zs) {
        if (Z.empty()) throw std::invalid_argument("change_of_vars_gap: empty Z set");
        sets.push_back(&Z);
    }

    const double plain = product_average(F, sets, N, nullptr, k, l);
    const double shifted = product_average(F, sets, N, &nu, k, l);

    ChangeOfVarsResult res;
    res.gap = std::abs(plain - shifted);
    res.bound = 50.0 * rho * static_cast<double>(k) * static_cast<double>(l) *
                static_cast<double>(d) * static_cast<double>(nu_inf);
    res.holds = res.gap <= res.bound + 1e-9 * std::max(1.0, res.bound);
    return res;
}

TranslateAverage translate_average(const std::vector<double>& f, const BohrSet& B,
                                   const std::vector<std::int64_t>& S,
                                   double lambda, double eps, double c) {
    const std::int64_t N = B.modulus();
    if (f.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("translate_average: f must be indexed by residue");
    if (S.empty()) throw std::invalid_argument("translate_average: S must be nonempty");
    const std::size_t d = std::max<std::size_t>(B.rank(), 1);
    if (lambda > eps / (200.0 * static_cast<double>(d)) + 1e-12)
        throw std::invalid_argument("translate_average: need lambda <= eps/(200 d)");
    const BohrSet Blam = B.dilate(lambda);
    for (std::int64_t s : S)
        if (!Blam.contains(s))
            throw std::invalid_argument("translate_average: S not inside B_lambda");
    {
        KahanSum sum;
        for (std::int64_t x : B.elements()) sum.add(f[static_cast<std::size_t>(x)]);
        if (sum.value() / static_cast<double>(B.size()) < c - 1e-12)
            throw std::invalid_argument("translate_average: avg_B f < c");
    }

    const BohrSet Binner = B.dilate(1.0 - lambda);
    for (std::int64_t t : Binner.elements()) {
        bool inside = true;
        KahanSum sum;
        for (std::int64_t s : S) {
            const std::int64_t x = (t + s) % N;
            if (!B.contains(x)) {
                inside = false;
                break;
            }
            sum.add(f[static_cast<std::size_t>(x)]);
        }
        if (!inside) continue;
        const double avg = sum.value() / static_cast<double>(S.size());
        if (avg >= c - eps - 1e-12) return TranslateAverage{t, avg};
    }
    throw std::runtime_error(
        "translate_average: no translate found (implementation bug; the "
        "corollary guarantees existence under the preconditions)");
}

}  // namespace skewlab
