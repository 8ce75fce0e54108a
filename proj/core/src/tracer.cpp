#include "skewlab/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "skewlab/inequalities.hpp"
#include "skewlab/kahan.hpp"
#include "skewlab/norms.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

namespace {

std::int64_t md(std::int64_t v, std::int64_t N) {
    v %= N;
    return v < 0 ? v + N : v;
}

// Dense indicator views of a trace input, plus vd and bal.
struct Ctx {
    std::int64_t N = 0;
    std::vector<char> inA;  // N*N, row x
    std::vector<char> inX;  // N
    std::vector<std::int64_t> Bel;
    std::vector<double> vd;   // N
    std::vector<double> bal;  // N*N
    double alpha = 0.0;

    char a(std::int64_t x, std::int64_t y) const { return inA[md(x, N) * N + md(y, N)]; }
    double b(std::int64_t x, std::int64_t y) const { return bal[md(x, N) * N + md(y, N)]; }
};

Ctx make_ctx(const TraceInput& in) {
    if (in.A.domain().kind != DomainKind::cyclic)
        throw std::invalid_argument("tracer: A must live on a cyclic domain");
    const std::int64_t N = in.A.domain().size;
    if (in.B.modulus() != N)
        throw std::invalid_argument("tracer: Bohr set modulus mismatch");
    if (in.X.empty() || in.B.size() == 0)
        throw std::invalid_argument("tracer: empty X or B");

    Ctx c;
    c.N = N;
    c.inA.assign(N * N, 0);
    c.inX.assign(N, 0);
    for (std::int64_t x : in.X) c.inX[md(x, N)] = 1;
    for (const auto& p : in.A.points()) {
        if (!c.inX[p.x]) throw std::invalid_argument("tracer: A not inside X x B");
        if (!in.B.contains(p.y)) throw std::invalid_argument("tracer: A not inside X x B");
        c.inA[p.x * N + p.y] = 1;
    }
    c.Bel = in.B.elements();

    c.vd.assign(N, 0.0);
    c.bal.assign(N * N, 0.0);
    for (std::int64_t x = 0; x < N; ++x) {
        std::int64_t cnt = 0;
        for (std::int64_t y : c.Bel) cnt += c.inA[x * N + y];
        c.vd[x] = static_cast<double>(cnt) / static_cast<double>(c.Bel.size());
    }
    for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t y = 0; y < N; ++y)
            c.bal[x * N + y] = c.inA[x * N + y] - c.vd[x];

    c.alpha = static_cast<double>(in.A.size()) /
              (static_cast<double>(in.X.size()) * static_cast<double>(c.Bel.size()));
    return c;
}

double pick_regular_scale(const BohrSet& B, double hi) {
    return hi * find_regular_dilate(B.dilate(hi));
}

// K(u, w1, w2) = E_{y in B} f(u, y+w1) f(u, y+w2), stored as N^3 row-major.
template <typename F>
std::vector<double> pair_corr(std::int64_t N, const std::vector<std::int64_t>& Bel,
                              F f) {
    std::vector<double> K(static_cast<std::size_t>(N) * N * N, 0.0);
    const double inv = 1.0 / static_cast<double>(Bel.size());
    for (std::int64_t u = 0; u < N; ++u) {
        // row(y) = f(u, y) cached on the full residue line
        std::vector<double> row(N);
        for (std::int64_t y = 0; y < N; ++y) row[y] = f(u, y);
        for (std::int64_t w1 = 0; w1 < N; ++w1)
            for (std::int64_t w2 = 0; w2 < N; ++w2) {
                KahanSum s;
                for (std::int64_t y : Bel) s.add(row[md(y + w1, N)] * row[md(y + w2, N)]);
                K[(u * N + w1) * N + w2] = s.value() * inv;
            }
    }
    return K;
}

struct ClaimAverages {
    double A1 = 0.0, A2 = 0.0, A3 = 0.0;
    double L1 = 0.0;  // E 1_X(x+s-t) on B_lambda x B_mu x B_mu
};

ClaimAverages compute_claim(const Ctx& c, const std::vector<std::int64_t>& Bl,
                            const std::vector<std::int64_t>& Bm) {
    const std::int64_t N = c.N;
    const double invM = 1.0 / static_cast<double>(Bm.size());

    // h[w][u] = E_{y in B} 1_A(u, y + w)
    std::vector<double> h(static_cast<std::size_t>(N) * N, 0.0);
    for (std::int64_t w = 0; w < N; ++w)
        for (std::int64_t u = 0; u < N; ++u) {
            std::int64_t cnt = 0;
            for (std::int64_t y : c.Bel) cnt += c.a(u, y + w);
            h[w * N + u] = static_cast<double>(cnt) / static_cast<double>(c.Bel.size());
        }

    // g(u) = E_{t in Bm} 1_X(u - t); g2(u) = E_{s in Bm} 1_X(u + s)
    std::vector<double> g(N, 0.0), g2(N, 0.0);
    for (std::int64_t u = 0; u < N; ++u) {
        std::int64_t c1 = 0, c2 = 0;
        for (std::int64_t t : Bm) {
            c1 += c.inX[md(u - t, N)];
            c2 += c.inX[md(u + t, N)];
        }
        g[u] = c1 * invM;
        g2[u] = c2 * invM;
    }

    ClaimAverages out;
    KahanSum a1, a2, a3, l1;
    for (std::int64_t x : Bl) {
        KahanSum gs, vsq;
        for (std::int64_t s : Bm) gs.add(g[md(x + s, N)]);
        for (std::int64_t a : Bm) vsq.add(c.vd[md(x + a, N)] * c.vd[md(x + a, N)]);
        const double gmean = gs.value() * invM;
        l1.add(gmean);
        a1.add(gmean * vsq.value() * invM);

        KahanSum a2x;
        for (std::int64_t s : Bm) {
            KahanSum inner;
            for (std::int64_t a : Bm) {
                const std::int64_t u = md(x + a, N);
                inner.add(c.vd[u] * h[s * N + u]);
            }
            a2x.add(g[md(x + s, N)] * inner.value() * invM);
        }
        a2.add(a2x.value() * invM);

        KahanSum a3x;
        for (std::int64_t a : Bm) {
            const std::int64_t u = md(x + a, N);
            for (std::int64_t t : Bm)
                a3x.add(g2[md(x - t, N)] * c.vd[u] * h[md(a + t, N) * N + u]);
        }
        a3.add(a3x.value() * invM * invM);
    }
    const double invL = 1.0 / static_cast<double>(Bl.size());
    out.A1 = a1.value() * invL;
    out.A2 = a2.value() * invL;
    out.A3 = a3.value() * invL;
    out.L1 = l1.value() * invL;
    return out;
}

double tolerant(double rhs) { return 1e-9 * std::max(1.0, std::abs(rhs)); }

}  // namespace

Verdict& StepReport::check(const std::string& name, double lhs, double rhs, bool hard) {
    Verdict v;
    v.name = name;
    v.lhs = lhs;
    v.rhs = rhs;
    v.holds = lhs >= rhs - tolerant(rhs);
    v.hard = hard;
    verdicts.push_back(std::move(v));
    return verdicts.back();
}

bool StepReport::all_hard_hold() const {
    for (const auto& v : verdicts)
        if (v.hard && !v.holds) return false;
    return true;
}

std::string outcome_kind_name(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::DensityIncrement: return "DensityIncrement";
        case OutcomeKind::Step1ColumnIncrement: return "Step1ColumnIncrement";
        case OutcomeKind::SmallnessViolation: return "SmallnessViolation";
        case OutcomeKind::SkewCornerPresent: return "SkewCornerPresent";
        case OutcomeKind::ChainBreak: return "ChainBreak";
    }
    return "?";
}

std::vector<std::string> IncrementConstants::overridden() const {
    std::vector<std::string> out;
    if (c1 != 0x1p-13) out.push_back("c1");
    if (c2 != 0x1p-14) out.push_back("c2");
    if (c3 != 0x1p-12) out.push_back("c3");
    if (C != 1.0) out.push_back("C");
    if (r) out.push_back("r");
    if (r_prime) out.push_back("r_prime");
    if (kappa) out.push_back("kappa");
    if (lambda) out.push_back("lambda");
    if (mu) out.push_back("mu");
    if (nu) out.push_back("nu");
    if (mu0) out.push_back("mu0");
    if (assume_corner_free) out.push_back("assume_corner_free");
    if (random_subset_y) out.push_back("random_subset_y");
    return out;
}

ResolvedScales resolve_scales(const IncrementConstants& consts, double alpha,
                              double delta, std::size_t d) {
    if (alpha <= 0 || delta <= 0)
        throw std::invalid_argument("resolve_scales: need positive alpha, delta");
    const double dd = std::max<double>(static_cast<double>(d), 1.0);
    ResolvedScales s;
    s.r = consts.r ? *consts.r
                   : 2 * static_cast<std::int64_t>(std::ceil(std::log2(2.0 / delta))) +
                         (std::int64_t{1} << 30);
    if (s.r % 2) ++s.r;
    if (s.r < 2) s.r = 2;
    s.r_prime = consts.r_prime ? *consts.r_prime : 64 * s.r;
    if (s.r_prime % 2) ++s.r_prime;

    const double base = alpha * alpha * alpha * alpha * delta / 32.0;
    s.kappa = consts.kappa
                  ? *consts.kappa
                  : std::exp(64.0 * s.r * std::log(base)) /
                        (std::pow(2.0, 20) * double(s.r) * double(s.r) * dd);
    const double l2d = std::log(2.0 / delta);
    s.mu0 = consts.mu0 ? *consts.mu0
                       : std::pow(alpha * delta / (2.0 * dd), consts.C * l2d * l2d);
    s.mu = consts.mu.value_or(0.0);
    s.nu = consts.nu.value_or(0.0);
    return s;
}

Step1Result step1_regularize(const TraceInput& in, const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    const std::int64_t N = c.N;
    Step1Result res;
    res.report.step = "step1";

    const double alpha = c.alpha;
    const double delta =
        static_cast<double>(in.X.size()) / static_cast<double>(in.B.size());
    res.report.measure("alpha", alpha);
    res.report.measure("delta", delta);

    const double hiThr = (1 + consts.c1 * consts.c1) * alpha * c.Bel.size();
    const double loThr = (1 - consts.c1) * alpha * c.Bel.size();
    std::vector<std::int64_t> X1, X2, X3;
    for (std::int64_t x : in.X) {
        std::int64_t cnt = 0;
        for (std::int64_t y : c.Bel) cnt += c.a(x, y);
        if (cnt >= hiThr) X1.push_back(x);
        else if (cnt >= loThr) X2.push_back(x);
        else X3.push_back(x);
    }
    res.report.measure("X1_size", double(X1.size()));
    res.report.measure("X2_size", double(X2.size()));
    res.report.measure("X3_size", double(X3.size()));

    if (double(X1.size()) >= consts.c1 * consts.c1 * alpha * double(in.X.size())) {
        std::int64_t cnt = 0;
        for (std::int64_t x : X1)
            for (std::int64_t y : c.Bel) cnt += c.a(x, y);
        const double dens = double(cnt) / (double(X1.size()) * double(c.Bel.size()));
        res.report.measure("column_increment_density", dens);
        res.report.check("column_increment", dens,
                         (1 + consts.c1 * consts.c1) * alpha, true);
        res.column_increment = true;
        res.X1 = std::move(X1);
        return res;
    }

    const ResolvedScales scales = resolve_scales(
        consts, alpha, std::max(delta, 1e-300), in.B.rank());
    double lambda = 1.0;
    std::int64_t t = 0;
    int iterations = 0;
    if (consts.lambda) {
        lambda = *consts.lambda;
    } else {
        std::vector<char> inX2(N, 0);
        for (std::int64_t x : X2) inX2[x] = 1;
        auto density_at = [&](std::int64_t tt, const std::vector<std::int64_t>& el) {
            std::int64_t cnt = 0;
            for (std::int64_t b : el) cnt += inX2[md(tt + b, N)];
            return double(cnt) / double(el.size());
        };
        double dens = density_at(0, in.B.dilate(lambda).elements());
        const int max_iters = 10000;
        while (iterations < max_iters) {
            const double next_hi = scales.kappa * lambda;
            if (next_hi <= 0 || !std::isfinite(next_hi)) break;
            const double next = pick_regular_scale(in.B, next_hi);
            const auto el = in.B.dilate(next).elements();
            std::int64_t best_t = -1;
            double best_d = 0.0;
            for (std::int64_t tt = 0; tt < N; ++tt) {
                const double dd = density_at(tt, el);
                if (dd > best_d) { best_d = dd; best_t = tt; }
            }
            if (best_t < 0 || best_d < (1 + consts.c2) * dens) break;
            lambda = next;
            t = best_t;
            dens = best_d;
            ++iterations;
        }
    }
    res.lambda = lambda;
    res.t = t;
    res.report.measure("lambda", lambda);
    res.report.measure("descent_iterations", double(iterations));
    res.report.witness("t", t);

    const auto Bl = in.B.dilate(lambda).elements();
    std::vector<char> inX2(N, 0);
    for (std::int64_t x : X2) inX2[x] = 1;
    for (std::int64_t b : Bl)
        if (inX2[md(t + b, N)]) res.X_out.push_back(b);  // already shifted by -t
    std::sort(res.X_out.begin(), res.X_out.end());

    const double dprime = double(res.X_out.size()) / double(Bl.size());
    res.report.measure("delta_prime", dprime);
    res.report.check("delta_prime_lower", dprime, delta / 2.0, false);
    return res;
}

StepReport claim_bounds(const TraceInput& in, double lambda, double mu) {
    Ctx c = make_ctx(in);
    StepReport rep;
    rep.step = "claim";

    const BohrSet Blam = in.B.dilate(lambda);
    const BohrSet Bmu = in.B.dilate(mu);
    rep.measure("Blambda_regular", certify_regular(Blam).regular ? 1.0 : 0.0);
    rep.measure("Bmu_regular", certify_regular(Bmu).regular ? 1.0 : 0.0);

    const double alpha = c.alpha;
    const double delta = double(in.X.size()) / double(Blam.size());
    const double a2d2 = alpha * alpha * delta * delta;

    const ClaimAverages cl = compute_claim(c, Blam.elements(), Bmu.elements());
    rep.measure("avg1_vd2", cl.A1);
    rep.measure("avg2_A_vd_s", cl.A2);
    rep.measure("avg3_A_vd_at", cl.A3);
    rep.measure("chi_L1", cl.L1);
    rep.check("claim_first_upper", 10.0 / 9.0 * a2d2, cl.A1, false);
    rep.check("claim_second_lower", cl.A2, 8.0 / 9.0 * a2d2, false);
    rep.check("claim_third_lower", cl.A3, 8.0 / 9.0 * a2d2, false);
    return rep;
}

Step2Result step2_imbalance(const TraceInput& in, const Step1Result& s1,
                            const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    const std::int64_t N = c.N;
    Step2Result res;
    res.report.step = "step2";
    res.lambda = s1.lambda;

    const double alpha = c.alpha;
    const BohrSet Blam = in.B.dilate(s1.lambda);
    const double delta = double(in.X.size()) / double(Blam.size());
    const std::size_t d = std::max<std::size_t>(in.B.rank(), 1);
    const ResolvedScales sc = resolve_scales(consts, alpha, delta, in.B.rank());
    res.mu = consts.mu ? *consts.mu
                       : pick_regular_scale(in.B, 2.0 * sc.kappa * s1.lambda);
    const BohrSet Bmu = in.B.dilate(res.mu);
    const auto& Bm = Bmu.elements();
    const auto& Bl = Blam.elements();
    const double invM = 1.0 / double(Bm.size());
    const std::int64_t r = sc.r;
    res.report.measure("mu", res.mu);
    res.report.measure("r", double(r));
    res.report.measure("alpha", alpha);
    res.report.measure("delta", delta);

    auto KA = pair_corr(N, c.Bel, [&](std::int64_t u, std::int64_t y) {
        return double(c.inA[u * N + y]);
    });
    auto KB = pair_corr(N, c.Bel, [&](std::int64_t u, std::int64_t y) {
        return c.bal[u * N + y];
    });
    auto K = [N](const std::vector<double>& T, std::int64_t u, std::int64_t w1,
                 std::int64_t w2) { return T[(md(u, N) * N + md(w1, N)) * N + md(w2, N)]; };

    // Parametrized skew-corner average and its balanced counterpart.
    KahanSum pc;
    for (std::int64_t x : Bl)
        for (std::int64_t a : Bm) {
            KahanSum inner;
            for (std::int64_t s : Bm)
                for (std::int64_t t : Bm)
                    inner.add(c.inX[md(x + s - t, N)] * K(KA, x + a, s, a + t));
            pc.add(inner.value() * invM * invM);
        }
    const double P_corner = pc.value() / double(Bl.size()) * invM;
    res.report.measure("parametrized_average", P_corner);
    res.report.measure("one_over_Bmu", invM);

    bool nonempty_columns = true;
    for (std::int64_t x : in.X) {
        std::int64_t cnt = 0;
        for (std::int64_t y : c.Bel) cnt += c.a(x, y);
        if (cnt == 0) { nonempty_columns = false; break; }
    }
    const bool corner_free = count_skew_corners(in.A) == 0;
    res.report.measure("corner_free", corner_free ? 1.0 : 0.0);
    res.report.measure("all_columns_nonempty", nonempty_columns ? 1.0 : 0.0);
    res.report.check("parametrized_average_upper", invM, P_corner,
                     corner_free && nonempty_columns);

    const ClaimAverages cl = compute_claim(c, Bl, Bm);
    const double Q_bal = P_corner - cl.A2 - cl.A3 + cl.A1;
    res.report.measure("balanced_average", Q_bal);
    res.report.measure("smallness_9a2d2", double(Bm.size()) * alpha * alpha * delta * delta);
    res.report.check("balanced_average_lower", std::abs(Q_bal),
                     alpha * alpha * delta * delta / 2.0, false);

    // W(x) = E_{s,t} inner(x,s,t)^r with inner = E_{y,a} bal bal.
    auto inner_st = [&](std::int64_t x, std::int64_t s, std::int64_t t) {
        KahanSum v;
        for (std::int64_t a : Bm) v.add(K(KB, x + a, s, a + t));
        return v.value() * invM;
    };
    KahanSum msum;
    double Wx0 = -1.0;
    std::int64_t x0 = 0;
    std::vector<double> Wvals;
    Wvals.reserve(Bl.size());
    for (std::int64_t x : Bl) {
        KahanSum w;
        for (std::int64_t s : Bm)
            for (std::int64_t t : Bm) w.add(std::pow(inner_st(x, s, t), double(r)));
        const double W = w.value() * invM * invM;
        Wvals.push_back(W);
        msum.add(W);
        if (W > Wx0) { Wx0 = W; x0 = x; }
    }
    const double M = msum.value() / double(Bl.size());
    res.x0 = x0;
    res.report.witness("x0", x0);
    res.report.measure("M_avg", M);
    res.report.measure("W_x0", Wx0);
    res.report.check("argmax_x0", Wx0, M, true);
    res.report.check("holderstep1", Wx0, std::pow(alpha * alpha * delta / 8.0, double(r)),
                     false);

    // Holder: |Q_bal| <= L1^{(r-1)/r} M^{1/r}, unconditional.
    const double hoelder_rhs =
        std::pow(cl.L1, double(r - 1) / double(r)) * std::pow(M, 1.0 / double(r));
    res.report.measure("chi_L1", cl.L1);
    res.report.check("holder_bound", hoelder_rhs, std::abs(Q_bal), true);
    res.report.check("chi_norm_upper", 4.0 * delta,
                     std::pow(cl.L1, double(r - 1) / double(r)), false);

    // s0, t0 by argmax of |inner(x0, s, t)|.
    double best = -1.0;
    for (std::int64_t s : Bm)
        for (std::int64_t t : Bm) {
            const double v = std::abs(inner_st(x0, s, t));
            if (v > best) { best = v; res.s0 = s; res.t0 = t; }
        }
    res.report.witness("s0", res.s0);
    res.report.witness("t0", res.t0);
    res.report.measure("inner_s0t0", best);
    res.report.check("argmax_s0t0", std::pow(best, double(r)), Wx0, true);

    std::int64_t xcnt = 0;
    for (std::int64_t a : Bm) xcnt += c.inX[md(x0 + a, N)];
    res.delta_mu = double(xcnt) * invM;
    res.report.measure("delta_mu", res.delta_mu);
    res.report.check("inner_support_bound", res.delta_mu, best, true);
    res.report.check("delta_mu_lower", res.delta_mu, alpha * alpha * delta / 8.0, false);
    res.report.check("delta_mu_upper", (1 + consts.c2) * delta, res.delta_mu, false);

    // VS power and the Cauchy-Schwarz / change-of-variables chain.
    KahanSum vs, f2;
    for (std::int64_t s : Bm)
        for (std::int64_t sp : Bm) {
            KahanSum p;
            for (std::int64_t a : Bm) p.add(K(KB, x0 + a, s, sp));
            vs.add(std::pow(p.value() * invM, double(r)));
        }
    res.vs_power = vs.value() * invM * invM;
    for (std::int64_t t : Bm)
        for (std::int64_t tp : Bm) {
            KahanSum p;
            for (std::int64_t a : Bm) p.add(K(KB, x0 + a, a + t, a + tp));
            f2.add(std::pow(p.value() * invM, double(r)));
        }
    const double F2 = f2.value() * invM * invM;
    res.report.measure("vs_power", res.vs_power);
    res.report.measure("F2_shifted", F2);
    res.report.check("holderstep2_cs", res.vs_power * F2, Wx0 * Wx0, true);
    res.report.check("holderstep3_gap", 50.0 * res.mu * double(r) * double(r) * double(d),
                     std::abs(F2 - res.vs_power), false);
    res.report.check("disbalanceineq", res.vs_power,
                     std::pow(alpha * alpha * delta / 16.0, double(r)), false);
    return res;
}

StepReport step3_unbalance(const TraceInput& in, const Step2Result& s2,
                           const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    const std::int64_t N = c.N;
    StepReport rep;
    rep.step = "step3";

    const double alpha = c.alpha;
    const BohrSet Blam = in.B.dilate(s2.lambda);
    const double delta = double(in.X.size()) / double(Blam.size());
    const std::size_t d = std::max<std::size_t>(in.B.rank(), 1);
    const ResolvedScales sc = resolve_scales(consts, alpha, delta, in.B.rank());
    const std::int64_t rp = sc.r_prime, r = sc.r;
    const BohrSet Bmu = in.B.dilate(s2.mu);
    const auto& Bm = Bmu.elements();
    const double invM = 1.0 / double(Bm.size());
    const std::int64_t x0 = s2.x0;
    rep.measure("r_prime", double(rp));

    auto KA = pair_corr(N, c.Bel, [&](std::int64_t u, std::int64_t y) {
        return double(c.inA[u * N + y]);
    });
    auto KB = pair_corr(N, c.Bel, [&](std::int64_t u, std::int64_t y) {
        return c.bal[u * N + y];
    });
    auto K = [N](const std::vector<double>& T, std::int64_t u, std::int64_t w1,
                 std::int64_t w2) { return T[(md(u, N) * N + md(w1, N)) * N + md(w2, N)]; };

    // P(s,s') and PA(s,s') kernels on B_mu x B_mu; V = E_a vd(x0+a)^2.
    const std::size_t m = Bm.size();
    std::vector<double> P(m * m), PA(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            KahanSum pb, pa;
            for (std::int64_t a : Bm) {
                pb.add(K(KB, x0 + a, Bm[i], Bm[j]));
                pa.add(K(KA, x0 + a, Bm[i], Bm[j]));
            }
            P[i * m + j] = pb.value() * invM;
            PA[i * m + j] = pa.value() * invM;
        }
    KahanSum vsum;
    for (std::int64_t a : Bm) {
        const double v = c.vd[md(x0 + a, N)];
        vsum.add(v * v);
    }
    const double V = vsum.value() * invM;
    rep.measure("V_vd2", V);

    // Pi_k = E_{s,s'} P^k V^{r'-k}; binomial aggregations in one pass.
    std::vector<double> Pi(rp + 1, 0.0);
    for (std::int64_t k = 0; k <= rp; ++k) {
        KahanSum s;
        const double vpow = std::pow(V, double(rp - k));
        for (std::size_t ij = 0; ij < m * m; ++ij)
            s.add(std::pow(P[ij], double(k)) * vpow);
        Pi[k] = s.value() * invM * invM;
        rep.measure("Pi_" + std::to_string(k), Pi[k]);
        rep.check("Pi_nonneg_" + std::to_string(k), Pi[k], -1e-12, true);
    }

    // One representative mixed-slot inner product, bounded by 24 d mu.
    std::vector<double> mbar(N, 0.0);
    for (std::int64_t u = 0; u < N; ++u) {
        KahanSum s;
        for (std::int64_t y : c.Bel) s.add(c.bal[u * N + y]);
        mbar[u] = s.value() / double(c.Bel.size());
    }
    // F_mix(s,s') = E_a (E_y bal(x0+a, y+s)) vd(x0+a); the s-slot kernel is
    // constant in s', so the full inner product collapses to a single average.
    KahanSum mix;
    for (std::int64_t s : Bm) {
        KahanSum fa;
        for (std::int64_t a : Bm) {
            // E_y bal(x0+a, y+s) over y in B
            KahanSum e;
            for (std::int64_t y : c.Bel) e.add(c.b(x0 + a, y + s));
            fa.add(e.value() / double(c.Bel.size()) * c.vd[md(x0 + a, N)]);
        }
        mix.add(fa.value() * invM * std::pow(V, double(rp - 1)));
    }
    const double mixed = mix.value() * invM;
    rep.measure("mixed_example", mixed);
    rep.check("mixed_upper", 24.0 * double(d) * s2.mu, std::abs(mixed), false);

    // Binomial aggregation.
    std::vector<double> binom(rp + 1);
    binom[0] = 1.0;
    for (std::int64_t k = 1; k <= rp; ++k)
        binom[k] = binom[k - 1] * double(rp - k + 1) / double(k);
    KahanSum sAll, sEven;
    for (std::int64_t k = 0; k <= rp; ++k) {
        sAll.add(binom[k] * Pi[k]);
        if (k % 2 == 0 && k >= r) sEven.add(binom[k] * Pi[k]);
    }
    rep.measure("binom_sum_all", sAll.value());
    rep.measure("binom_sum_even", sEven.value());

    KahanSum va;
    for (std::size_t ij = 0; ij < m * m; ++ij) va.add(std::pow(PA[ij], double(rp)));
    const double vsA = va.value() * invM * invM;
    rep.measure("vsA_power", vsA);

    const double mixslack = std::pow(4.0, double(rp)) * 24.0 * double(d) * s2.mu;
    rep.check("vsA_vs_binom_all", vsA, sAll.value() - mixslack, false);
    rep.check("vsA_vs_binom_even", vsA, sEven.value() - mixslack, false);

    double pik_worst = std::numeric_limits<double>::infinity();
    for (std::int64_t k = r; k <= rp; k += 2) {
        const double bound = std::pow(1.0 / 32.0, double(k)) *
                             std::pow(1 - consts.c1, 2.0 * rp) *
                             std::pow(alpha, 2.0 * rp) * std::pow(s2.delta_mu, double(rp));
        pik_worst = std::min(pik_worst, Pi[k] - bound);
    }
    rep.measure("pik_lower_worst_slack", pik_worst);
    rep.check("pik_lower_bounds", pik_worst, 0.0, false);

    rep.check("unbalancing_conclusion", vsA,
              std::pow(1.0 + 1.0 / 256.0, double(rp)) * std::pow(alpha, 2.0 * rp) *
                  std::pow(s2.delta_mu, double(rp)),
              false);
    return rep;
}

Step4Result step4_sift(const TraceInput& in, const Step2Result& s2,
                       const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    const std::int64_t N = c.N;
    Step4Result res;
    res.report.step = "step4";

    const double alpha = c.alpha;
    const BohrSet Blam = in.B.dilate(s2.lambda);
    const double delta = double(in.X.size()) / double(Blam.size());
    const std::size_t d = std::max<std::size_t>(in.B.rank(), 1);
    const ResolvedScales sc = resolve_scales(consts, alpha, delta, in.B.rank());
    const std::int64_t rp = sc.r_prime;
    const BohrSet Bmu = in.B.dilate(s2.mu);
    const auto& Bm = Bmu.elements();
    const std::int64_t x0 = s2.x0;
    const double dmu = s2.delta_mu;

    // u(y, y') = E_{a in Bmu, t in B} 1_A(x0+a, t+y) 1_A(x0+a, t+y'); the
    // second argument is allowed to range over all residues.
    auto u_of = [&](std::int64_t y, std::int64_t yp) {
        KahanSum s;
        for (std::int64_t a : Bm) {
            std::int64_t cnt = 0;
            for (std::int64_t t : c.Bel) cnt += c.a(x0 + a, t + y) * c.a(x0 + a, t + yp);
            s.add(double(cnt) / double(c.Bel.size()));
        }
        return s.value() / double(Bm.size());
    };

    // y'_0 by argmax of E_{y in Bmu} u(y, y')^{r'}.
    double best_obj = -1.0, obj_sum = 0.0;
    std::vector<double> u_y0(Bm.size());
    for (std::int64_t yp : Bm) {
        KahanSum o;
        for (std::int64_t y : Bm) o.add(std::pow(u_of(y, yp), double(rp)));
        const double obj = o.value() / double(Bm.size());
        obj_sum += obj;
        if (obj > best_obj) { best_obj = obj; res.yprime0 = yp; }
    }
    res.report.witness("yprime0", res.yprime0);
    res.report.measure("sift_objective", best_obj);
    res.report.check("argmax_yprime0", best_obj, obj_sum / double(Bm.size()), true);

    // D and the display that certifies its size.
    const double dthr = (1.0 + 1.0 / 512.0) * alpha * alpha * dmu;
    KahanSum dsum_D, dsum_all;
    for (std::size_t i = 0; i < Bm.size(); ++i) {
        const double uy = u_of(Bm[i], res.yprime0);
        u_y0[i] = uy;
        dsum_all.add(std::pow(uy, double(rp)));
        if (uy >= dthr) {
            res.D.push_back(Bm[i]);
            dsum_D.add(std::pow(uy, double(rp)));
        }
    }
    res.report.measure("D_size", double(res.D.size()));
    res.report.check(
        "sift_D_display",
        dsum_D.value() - (1 - consts.c3) * dsum_all.value(),
        std::pow(alpha, 2.0 * rp) * std::pow(dmu, double(rp)) * double(Bm.size()),
        false);

    // nu and B_nu.
    const double nuw = std::exp(double(rp) * std::log(alpha * alpha * alpha * alpha *
                                                      delta / 8.0)) *
                       s2.mu / (std::pow(2.0, 40) * double(rp + 1) * double(d));
    res.nu = consts.nu ? *consts.nu
                       : (nuw > 0 && std::isfinite(nuw) ? pick_regular_scale(in.B, nuw)
                                                        : 0.0);
    if (res.nu <= 0)
        throw std::invalid_argument("step4: nu scale underflowed; override nu");
    const BohrSet Bnu = in.B.dilate(res.nu);
    const auto& Bn = Bnu.elements();
    res.report.measure("nu", res.nu);
    res.report.measure("Bnu_size", double(Bn.size()));

    // Greedy (a_i, t_i) by the method of conditional expectations on
    // Phi = E_{y in Bmu, z in Bnu} (1_D(y-z) - (1-c3)) prod_i m_{a_i,t_i}(y,z).
    std::vector<char> inD(N, 0);
    for (std::int64_t y : res.D) inD[md(y, N)] = 1;
    const std::size_t ny = Bm.size(), nz = Bn.size();
    std::vector<double> w(ny * nz), mbar(ny * nz, 0.0), cur(ny * nz, 1.0);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t iz = 0; iz < nz; ++iz)
            w[iy * nz + iz] = inD[md(Bm[iy] - Bn[iz], N)] - (1 - consts.c3);

    auto mpair = [&](std::int64_t a, std::int64_t t, std::int64_t y, std::int64_t z) {
        return double(c.a(x0 + a, t + y) * c.a(x0 + a, res.yprime0 + t + z));
    };
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t iz = 0; iz < nz; ++iz) {
            KahanSum s;
            for (std::int64_t a : Bm)
                for (std::int64_t t : c.Bel) s.add(mpair(a, t, Bm[iy], Bn[iz]));
            mbar[iy * nz + iz] = s.value() / (double(Bm.size()) * double(c.Bel.size()));
        }

    auto phi_with = [&](const std::vector<double>& base, int power) {
        KahanSum s;
        for (std::size_t ij = 0; ij < ny * nz; ++ij)
            s.add(w[ij] * base[ij] * std::pow(mbar[ij], double(power)));
        return s.value() / (double(ny) * double(nz));
    };
    const double phi0 = phi_with(cur, int(rp));
    res.report.measure("phi_initial", phi0);
    res.report.check("phi_initial_lower", phi0,
                     0.5 * std::pow(alpha, 2.0 * rp) * std::pow(dmu, double(rp)), false);

    double phi_prev = phi0;
    for (std::int64_t i = 0; i < rp; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        std::int64_t ba = 0, bt = 0;
        std::vector<double> trial(ny * nz);
        std::vector<double> best_trial;
        for (std::int64_t a : Bm)
            for (std::int64_t t : c.Bel) {
                for (std::size_t iy = 0; iy < ny; ++iy)
                    for (std::size_t iz = 0; iz < nz; ++iz)
                        trial[iy * nz + iz] =
                            cur[iy * nz + iz] * mpair(a, t, Bm[iy], Bn[iz]);
                const double phi = phi_with(trial, int(rp - i - 1));
                if (phi > best) { best = phi; ba = a; bt = t; best_trial = trial; }
            }
        res.a_vec.push_back(ba);
        res.t_vec.push_back(bt);
        cur = std::move(best_trial);
        res.report.check("greedy_monotone_" + std::to_string(i), best,
                         phi_prev - 1e-12, true);
        phi_prev = best;
    }
    res.report.measure("phi_final", phi_prev);
    res.report.check("phi_final_vs_initial", phi_prev, phi0, true);

    // Y, Z and the density equations.
    for (std::int64_t y : Bm) {
        bool ok = true;
        for (std::int64_t i = 0; i < rp && ok; ++i)
            ok = c.a(x0 + res.a_vec[i], y + res.t_vec[i]);
        if (ok) res.Y.push_back(y);
    }
    for (std::int64_t z : Bn) {
        bool ok = true;
        for (std::int64_t i = 0; i < rp && ok; ++i)
            ok = c.a(x0 + res.a_vec[i], res.yprime0 + res.t_vec[i] + z);
        if (ok) res.Z.push_back(z);
    }
    res.beta = double(res.Y.size()) / double(Bm.size());
    res.gamma = double(res.Z.size()) / double(Bn.size());
    res.report.measure("beta", res.beta);
    res.report.measure("gamma", res.gamma);

    KahanSum dyz;
    for (std::int64_t y : res.Y)
        for (std::int64_t z : res.Z) dyz.add(inD[md(y - z, N)]);
    const double ed = dyz.value() / (double(Bm.size()) * double(Bn.size()));
    res.report.measure("E_D_Y_Z", ed);
    res.report.check("densityEQN", ed, (1 - consts.c3) * res.beta * res.gamma, false);
    const double halfpow = 0.5 * std::pow(alpha, 2.0 * rp) * std::pow(dmu, double(rp));
    res.report.check("densityEQN2_beta", res.beta, halfpow, false);
    res.report.check("densityEQN2_gamma", res.gamma, halfpow, false);
    res.report.check("densityEQN2_D", double(res.D.size()) / double(Bm.size()), halfpow,
                     false);
    return res;
}

Step5Result step5_ap(const TraceInput& in, const Step2Result& s2,
                     const Step4Result& s4, const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    const std::int64_t N = c.N;
    Step5Result res;
    res.report.step = "step5";

    const BohrSet Bmu = in.B.dilate(s2.mu);
    const BohrSet Bnu = in.B.dilate(s4.nu);
    std::vector<char> inD(N, 0);
    for (std::int64_t y : s4.D) inD[md(y, N)] = 1;

    auto d_correlation = [&](const std::vector<std::int64_t>& Y) {
        KahanSum s;
        for (std::int64_t y : Y)
            for (std::int64_t z : s4.Z) s.add(inD[md(y - z, N)]);
        return s.value() / (double(Bmu.size()) * double(Bnu.size()));
    };

    res.Y = s4.Y;
    res.beta = s4.beta;
    const double pre_ratio =
        s4.beta * s4.gamma > 0 ? d_correlation(s4.Y) / (s4.beta * s4.gamma) : 0.0;
    if (res.Y.size() > s4.D.size()) {
        if (consts.random_subset_y) {
            std::vector<std::int64_t> pool = res.Y;
            CounterRng rng(consts.seed);
            for (std::size_t i = pool.size(); i > 1; --i)
                std::swap(pool[i - 1], pool[rng.next_below(i)]);
            pool.resize(s4.D.size());
            std::sort(pool.begin(), pool.end());
            res.Y = std::move(pool);
        } else {
            std::vector<std::pair<std::int64_t, std::int64_t>> scored;  // (-score, y)
            for (std::int64_t y : s4.Y) {
                std::int64_t score = 0;
                for (std::int64_t z : s4.Z) score += inD[md(y - z, N)];
                scored.emplace_back(-score, y);
            }
            std::sort(scored.begin(), scored.end());
            scored.resize(s4.D.size());
            res.Y.clear();
            for (auto& [ns, y] : scored) res.Y.push_back(y);
            std::sort(res.Y.begin(), res.Y.end());
        }
        res.beta = double(res.Y.size()) / double(Bmu.size());
        const double post_ratio =
            res.beta * s4.gamma > 0 ? d_correlation(res.Y) / (res.beta * s4.gamma) : 0.0;
        res.report.measure("adjusted", 1.0);
        res.report.measure("pre_ratio", pre_ratio);
        res.report.measure("post_ratio", post_ratio);
        if (!consts.random_subset_y)
            res.report.check("greedy_subset_no_loss", post_ratio, pre_ratio - 1e-12,
                             true);
    } else {
        res.report.measure("adjusted", 0.0);
    }
    res.report.measure("beta", res.beta);

    ApInstance inst{Bmu, Bnu, {}, {}, {}, 0.0};
    inst.Y = res.Y;
    inst.Z = s4.Z;
    inst.D = s4.D;
    inst.eps = consts.c3;

    std::vector<double> grid = consts.ap_radius_grid;
    if (grid.empty()) {
        const double rho_nu = Bnu.radius();
        grid = {rho_nu, 0.8 * rho_nu, 0.6 * rho_nu, 0.4 * rho_nu, 0.2 * rho_nu};
    }
    if (inst.Y.empty() || inst.Z.empty()) {
        res.chain_break = true;
        res.report.measure("ap_found", 0.0);
        return res;
    }
    auto found = ap_search(inst, consts.ap_max_rank, grid);
    res.report.measure("ap_found", found ? 1.0 : 0.0);
    if (!found) {
        res.chain_break = true;
        return res;
    }
    res.Bprime = *found;

    // Post-B' almost-periodic correlation.
    KahanSum s;
    for (std::int64_t y : res.Y)
        for (std::int64_t z : s4.Z) {
            std::int64_t hits = 0;
            for (std::int64_t wv : found->elements()) hits += inD[md(y - z + wv, N)];
            s.add(double(hits) / double(found->size()));
        }
    const double post = s.value() / (double(Bmu.size()) * double(Bnu.size()));
    res.report.measure("E_D_shifted", post);
    res.report.check("ap_conclusion", post,
                     (1 - 2 * consts.c3) * res.beta * s4.gamma, false);
    return res;
}

IncrementOutcome step6_complete(const TraceInput& in, const Step2Result& s2,
                                const Step4Result& s4, const Step5Result& s5,
                                const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    const std::int64_t N = c.N;
    IncrementOutcome out;
    StepReport rep;
    rep.step = "step6";

    const double alpha = c.alpha;
    const double c1 = consts.c1;
    const double dmu = s2.delta_mu;
    const std::int64_t x0 = s2.x0;
    const BohrSet Bmu = in.B.dilate(s2.mu);
    const auto& Bm = Bmu.elements();
    out.base_alpha = alpha;

    if (!s5.Bprime) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "step5 produced no almost-periodicity Bohr set";
        out.reports.push_back(rep);
        return out;
    }
    const BohrSet& Bp = *s5.Bprime;
    const auto& Bpe = Bp.elements();

    // ufull(v) = E_{a in Bmu, b in B} 1_A(x0+a, v+b) 1_A(x0+a, y'0+b).
    std::vector<double> ufull(N, 0.0);
    for (std::int64_t v = 0; v < N; ++v) {
        KahanSum s;
        for (std::int64_t a : Bm) {
            std::int64_t cnt = 0;
            for (std::int64_t b : c.Bel)
                cnt += c.a(x0 + a, v + b) * c.a(x0 + a, s4.yprime0 + b);
            s.add(double(cnt) / double(c.Bel.size()));
        }
        ufull[v] = s.value() / double(Bm.size());
    }
    auto R = [&](std::int64_t y, std::int64_t z) {
        KahanSum s;
        for (std::int64_t wv : Bpe) s.add(ufull[md(y - z + wv, N)]);
        return s.value() / double(Bpe.size());
    };

    // (y0, z0) by argmax over Y x Z.
    if (s5.Y.empty() || s4.Z.empty()) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "empty Y or Z entering step 6";
        out.reports.push_back(rep);
        return out;
    }
    double bestR = -1.0;
    std::int64_t y0 = 0, z0 = 0;
    KahanSum rsum;
    for (std::int64_t y : s5.Y)
        for (std::int64_t z : s4.Z) {
            const double v = R(y, z);
            rsum.add(v);
            if (v > bestR) { bestR = v; y0 = y; z0 = z; }
        }
    const double ravg = rsum.value() / (double(s5.Y.size()) * double(s4.Z.size()));
    rep.witness("y0", y0);
    rep.witness("z0", z0);
    rep.measure("R_y0z0", bestR);
    rep.check("argmax_y0z0", bestR, ravg, true);
    rep.check("R_lower", bestR, (1 + 8 * c1) * alpha * alpha * dmu, false);

    // G, b0. col(b) = E_{a in Bmu} 1_A(x0+a, y'0+b).
    std::vector<std::int64_t> G;
    KahanSum glhs, gcol, gdiff;
    double best_diff = -std::numeric_limits<double>::infinity();
    std::int64_t b0 = 0;
    auto colv = [&](std::int64_t bb) {
        std::int64_t cnt = 0;
        for (std::int64_t a : Bm) cnt += c.a(x0 + a, s4.yprime0 + bb);
        return double(cnt) / double(Bm.size());
    };
    auto lhsb = [&](std::int64_t bb) {
        KahanSum s;
        for (std::int64_t a : Bm) {
            std::int64_t cnt = 0;
            for (std::int64_t wv : Bpe) cnt += c.a(x0 + a, y0 - z0 + bb + wv);
            s.add(double(cnt) / double(Bpe.size()) * c.a(x0 + a, s4.yprime0 + bb));
        }
        return s.value() / double(Bm.size());
    };
    for (std::int64_t b : c.Bel) {
        const double cv = colv(b);
        if (cv >= 4 * c1 * alpha * alpha * dmu) {
            G.push_back(b);
            const double lv = lhsb(b);
            const double diff = lv - (1 + 2 * c1) * alpha * cv;
            glhs.add(lv);
            gcol.add(cv);
            gdiff.add(diff);
            if (diff > best_diff) { best_diff = diff; b0 = b; }
        }
    }
    rep.measure("G_size", double(G.size()));
    if (G.empty()) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "G is empty; no column passes the density floor";
        out.reports.push_back(rep);
        return out;
    }
    rep.witness("b0", b0);
    rep.check("G_sum_lower", glhs.value() / double(c.Bel.size()),
              (1 + 4 * c1) * alpha * alpha * dmu, false);
    rep.check("G_col_upper", (1 + c1) * alpha * dmu,
              gcol.value() / double(c.Bel.size()), false);
    rep.check("argmax_b0", best_diff, gdiff.value() / double(G.size()), true);
    rep.check("b0_gain", best_diff, 0.0, false);

    // X-tilde, w0, X-tilde'.
    std::vector<std::int64_t> Xt;
    for (std::int64_t a : Bm)
        if (c.a(x0 + a, s4.yprime0 + b0)) Xt.push_back(md(x0 + a, N));
    const double dprime = double(Xt.size()) / double(Bm.size());
    rep.measure("delta_prime", dprime);
    rep.check("delta_prime_lower", dprime, 4 * c1 * alpha * alpha * dmu, false);

    const std::int64_t w0 = md(y0 - z0 + b0, N);
    rep.witness("w0", w0);
    std::vector<std::int64_t> Xtp;
    for (std::int64_t x : Xt) {
        std::int64_t cnt = 0;
        for (std::int64_t wv : Bpe) cnt += c.a(x, w0 + wv);
        if (double(cnt) / double(Bpe.size()) >= (1 + c1) * alpha) Xtp.push_back(x);
    }
    rep.measure("Xtilde_size", double(Xt.size()));
    rep.measure("Xtilde_prime_size", double(Xtp.size()));
    rep.check("Xtilde_prime_lower", double(Xtp.size()),
              c1 * alpha * dprime * double(Bm.size()), false);
    if (Xtp.empty()) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "X-tilde' is empty; no column clears (1 + c1) alpha on w0 + B'";
        out.reports.push_back(rep);
        return out;
    }

    // t0: first translate with t0 + B' inside x0 + Bmu and enough of X-tilde'.
    std::vector<char> inXtp(N, 0), inBmu(N, 0);
    for (std::int64_t x : Xtp) inXtp[x] = 1;
    for (std::int64_t a : Bm) inBmu[md(x0 + a, N)] = 1;
    const double tthr = 0.5 * c1 * alpha * dprime;
    std::int64_t t0 = -1;
    double tilde_delta = 0.0;
    for (std::int64_t t = 0; t < N; ++t) {
        bool inside = true;
        std::int64_t cnt = 0;
        for (std::int64_t wv : Bpe) {
            const std::int64_t u = md(t + wv, N);
            if (!inBmu[u]) { inside = false; break; }
            cnt += inXtp[u];
        }
        if (!inside) continue;
        const double dens = double(cnt) / double(Bpe.size());
        if (dens >= tthr) { t0 = t; tilde_delta = dens; break; }
    }
    if (t0 < 0) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "no translate t0 + B' inside x0 + Bmu captures X-tilde'";
        out.reports.push_back(rep);
        return out;
    }
    rep.witness("t0", t0);
    rep.measure("tilde_delta", tilde_delta);

    // Final density on X-tilde'' x (w0 + B').
    std::vector<std::int64_t> Xtt;
    for (std::int64_t wv : Bpe)
        if (inXtp[md(t0 + wv, N)]) Xtt.push_back(md(t0 + wv, N));
    KahanSum fin;
    for (std::int64_t x : Xtt) {
        std::int64_t cnt = 0;
        for (std::int64_t wv : Bpe) cnt += c.a(x, w0 + wv);
        fin.add(double(cnt) / double(Bpe.size()));
    }
    const double final_density = fin.value() / double(Xtt.size());
    rep.measure("final_density", final_density);
    rep.measure("Xtilde2_size", double(Xtt.size()));

    auto& v1 = rep.check("conclusion_density", final_density, (1 + c1) * alpha, false);
    const double delta_in = double(in.X.size()) / double(in.B.dilate(s2.lambda).size());
    auto& v2 = rep.check("conclusion_section", double(Xtt.size()),
                         std::pow(alpha, consts.C) * delta_in * double(Bpe.size()) /
                             consts.C,
                         false);

    out.Bprime = Bp;
    out.x_translate = t0;
    out.y_translate = w0;
    out.final_density = final_density;
    out.x_section_size = static_cast<std::int64_t>(Xtt.size());
    if (v1.holds && v2.holds) {
        out.kind = OutcomeKind::DensityIncrement;
    } else {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = v1.holds ? "conclusion_section failed" : "conclusion_density failed";
    }
    out.reports.push_back(rep);
    return out;
}

IncrementOutcome run_increment(const TraceInput& in, const IncrementConstants& consts) {
    Ctx c = make_ctx(in);
    IncrementOutcome out;
    const double alpha = c.alpha;
    const double delta = double(in.X.size()) / double(in.B.size());

    if (alpha >= 1.0 - 1e-12) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "alpha = 1; density increment impossible";
        return out;
    }

    // Smallness condition first.
    const ResolvedScales sc = resolve_scales(consts, alpha, delta, in.B.rank());
    StepReport pre;
    pre.step = "preconditions";
    pre.measure("alpha", alpha);
    pre.measure("delta", delta);
    pre.measure("mu0", sc.mu0);
    const double b_mu0 =
        sc.mu0 > 0 && std::isfinite(sc.mu0)
            ? double(in.B.dilate(sc.mu0).size())
            : 1.0;
    pre.measure("B_mu0_size", b_mu0);
    auto& small = pre.check("smallness", b_mu0,
                            9.0 / (alpha * alpha * delta * delta), false);
    out.reports.push_back(pre);
    if (!small.holds) {
        out.kind = OutcomeKind::SmallnessViolation;
        out.detail = "|B_mu0| < 9 alpha^-2 delta^-2";
        return out;
    }

    if (!consts.assume_corner_free) {
        if (auto w = find_skew_corner(in.A)) {
            out.kind = OutcomeKind::SkewCornerPresent;
            out.corner = *w;
            out.detail = "input set contains a non-trivial skew corner";
            return out;
        }
    }

    Step1Result s1 = step1_regularize(in, consts);
    out.reports.push_back(s1.report);
    if (s1.column_increment) {
        out.kind = OutcomeKind::Step1ColumnIncrement;
        out.column_set = s1.X1;
        return out;
    }
    if (s1.X_out.empty()) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "regularized X is empty";
        return out;
    }

    // Rebind: shift A by (-t, 0), restrict to X_out x B.
    const std::int64_t N = c.N;
    std::vector<char> inXr(N, 0);
    for (std::int64_t x : s1.X_out) inXr[x] = 1;
    std::vector<Point2> pts;
    for (const auto& p : in.A.points()) {
        const std::int64_t xs = md(p.x - s1.t, N);
        if (inXr[xs]) pts.push_back({xs, p.y});
    }
    TraceInput post{PointSet2(Domain::cyclic(N), std::move(pts)), s1.X_out, in.B};
    if (post.A.empty()) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "A empties out after regularization";
        return out;
    }

    Step2Result s2 = step2_imbalance(post, s1, consts);
    out.reports.push_back(claim_bounds(post, s1.lambda, s2.mu));
    out.reports.push_back(s2.report);
    out.reports.push_back(step3_unbalance(post, s2, consts));
    Step4Result s4 = step4_sift(post, s2, consts);
    out.reports.push_back(s4.report);
    Step5Result s5 = step5_ap(post, s2, s4, consts);
    out.reports.push_back(s5.report);
    if (s5.chain_break) {
        out.kind = OutcomeKind::ChainBreak;
        out.detail = "almost-periodicity search exhausted";
        return out;
    }
    IncrementOutcome fin = step6_complete(post, s2, s4, s5, consts);
    for (auto& r : fin.reports) out.reports.push_back(r);
    out.kind = fin.kind;
    out.detail = fin.detail;
    out.Bprime = fin.Bprime;
    // Translate back to the original coordinates (A was shifted by (-t, 0)).
    out.x_translate = md(fin.x_translate + s1.t, N);
    out.y_translate = fin.y_translate;
    out.base_alpha = fin.base_alpha;
    out.final_density = fin.final_density;
    out.x_section_size = fin.x_section_size;
    return out;
}

IterationLog iterate_theorem(const PointSet2& A, const IncrementConstants& consts,
                             int max_steps) {
    IterationLog log;
    std::int64_t N = A.domain().size;
    PointSet2 cur;
    if (A.domain().kind == DomainKind::grid) {
        if (N % 3 != 0)
            throw std::invalid_argument("iterate_theorem: grid size must be divisible by 3");
        // Nine-box passage: pick the densest third-by-third box.
        const std::int64_t third = N / 3;
        std::size_t best = 0;
        int bi = 0, bj = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                std::size_t cnt = 0;
                for (const auto& p : A.points())
                    if ((p.x - 1) / third == i && (p.y - 1) / third == j) ++cnt;
                if (cnt > best) { best = cnt; bi = i; bj = j; }
            }
        std::vector<Point2> pts;
        for (const auto& p : A.points())
            if ((p.x - 1) / third == bi && (p.y - 1) / third == bj)
                pts.push_back({p.x - 1, p.y - 1});
        cur = PointSet2(Domain::cyclic(N), std::move(pts));
    } else {
        cur = A;
    }

    BohrSet B = build_bohr(N, {}, 1.0);
    std::vector<std::int64_t> X(N);
    std::iota(X.begin(), X.end(), 0);

    const double alpha0 = double(cur.size()) / double(N * N);
    const double C = consts.C;
    for (int i = 0; i < max_steps; ++i) {
        IterationEntry e;
        e.i = i;
        e.delta = double(X.size()) / double(B.size());
        e.rank = B.rank();
        e.radius = B.radius();
        e.alpha = cur.empty() ? 0.0
                              : double(cur.size()) / (double(X.size()) * double(B.size()));
        const double lg = std::log(2.0 * C / std::max(alpha0, 1e-300));
        const double K = std::pow(C, C + 1) * std::pow(double(i + 1), C + 1) *
                         std::pow(lg, 2.0 * C);
        StepReport bc;
        bc.check("bullet_delta", e.delta,
                 std::pow(alpha0, C * i) * std::pow(C, -double(i)), false);
        bc.check("bullet_rank", K, double(e.rank), false);
        bc.check("bullet_radius", e.radius,
                 std::exp(-K) / std::pow(std::max(K, 1.0), 3.0 * i), false);
        e.bullet_checks = bc.verdicts;

        if (cur.empty()) {
            e.outcome = OutcomeKind::ChainBreak;
            log.entries.push_back(e);
            break;
        }
        TraceInput in{cur, X, B};
        IncrementOutcome o = run_increment(in, consts);
        e.outcome = o.kind;
        log.entries.push_back(e);
        log.outcomes.push_back(o);
        if (o.kind != OutcomeKind::DensityIncrement) break;

        // Rebind to the increment's sub-product, translated to the origin.
        const BohrSet& Bp = *o.Bprime;
        std::vector<char> inBp(N, 0);
        for (std::int64_t b : Bp.elements()) inBp[b] = 1;
        std::vector<char> inX(N, 0);
        for (std::int64_t x : X) inX[x] = 1;
        std::vector<std::int64_t> Xn;
        for (std::int64_t b : Bp.elements())
            if (inX[md(o.x_translate + b, N)]) Xn.push_back(b);
        std::vector<char> inXn(N, 0);
        for (std::int64_t x : Xn) inXn[x] = 1;
        std::vector<Point2> pts;
        for (const auto& p : cur.points()) {
            const std::int64_t xs = md(p.x - o.x_translate, N);
            const std::int64_t ys = md(p.y - o.y_translate, N);
            if (inXn[xs] && inBp[ys]) pts.push_back({xs, ys});
        }
        cur = PointSet2(Domain::cyclic(N), std::move(pts));
        X = std::move(Xn);
        B = Bp;
        if (X.empty()) break;
    }
    return log;
}

}  // namespace skewlab
