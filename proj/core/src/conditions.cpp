#include "travwave/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace travwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMargin = 1e-12;

enum class TailClass { BoundedStable, DivergesPlus, DivergesMinus, Unstable };

struct TailResult {
    TailClass cls = TailClass::Unstable;
    double limit = 0.0;
    std::vector<Witness> samples;
};

// Classifies r(t_k) along the dyadic approach t_k = s* -+ 2^-k, k = 8..40.
TailResult assessTail(const ProblemSpec& spec, bool leftSide,
                      double (*ratio)(const ProblemSpec&, double, bool)) {
    TailResult out;
    std::vector<double> vals;
    for (int k = 8; k <= 40; ++k) {
        double off = std::ldexp(1.0, -k);
        double t = leftSide ? spec.sStar - off : spec.sStar + off;
        if (t <= 0.0 || t >= 1.0) continue;
        double r;
        try {
            r = ratio(spec, t, leftSide);
        } catch (const EvalDomainError&) {
            continue;
        }
        if (!std::isfinite(r)) continue;
        vals.push_back(r);
        out.samples.push_back({t, r, ""});
    }
    if (vals.size() < 8) return out;

    double last = vals.back();
    double earlier = vals[vals.size() - 7];
    if (std::fabs(last) > 1e8 && std::fabs(last) > 2.0 * std::fabs(earlier)) {
        out.cls = last > 0 ? TailClass::DivergesPlus : TailClass::DivergesMinus;
        out.limit = last > 0 ? kInf : -kInf;
        return out;
    }
    double mn = kInf, mx = -kInf;
    for (std::size_t i = vals.size() - 8; i < vals.size(); ++i) {
        mn = std::min(mn, vals[i]);
        mx = std::max(mx, vals[i]);
    }
    double scale = std::max({std::fabs(mn), std::fabs(mx), 1e-9});
    if (mx - mn <= 1e-2 * scale) {
        out.cls = TailClass::BoundedStable;
        out.limit = vals.back();
    }
    return out;
}

double ratioTail(const ProblemSpec& spec, double t, bool leftSide) {
    double dh = spec.h.eval(spec.sStar, Side::Point) - spec.h.eval(t, Side::Point);
    double f = eval_f(spec, t, Side::Point);
    double off = leftSide ? spec.sStar - t : t - spec.sStar;
    double num = std::pow(off, spec.pPrime - 1.0) * dh;
    double den = leftSide ? -f : f;
    if (den == 0.0) throw EvalDomainError("forcing vanishes on the tail", t);
    return num / den;
}

// cumulative convection increment m(t) = int_{s*}^t (h(s*) - h)
struct IncrementIntegral {
    double hs;
    double sStar;
    CumulativeH H;
    double Hs;
    explicit IncrementIntegral(const ProblemSpec& spec)
        : hs(spec.h.eval(spec.sStar, Side::Point)), sStar(spec.sStar), H(spec), Hs(H(spec.sStar)) {}
    double operator()(double t) const { return hs * (t - sStar) - (H(t) - Hs); }
};

std::vector<double> conditionGrid(const ProblemSpec& spec, double lo, double hi,
                                  double closestOffset) {
    std::vector<double> grid;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double t = lo + (hi - lo) * i / n;
        if (std::fabs(t - spec.sStar) >= closestOffset && t > 0.0 && t < 1.0)
            grid.push_back(t);
    }
    // geometric refinement toward s* from both admissible sides
    for (int k = 1; k <= 40; ++k) {
        double off = std::max(closestOffset, (hi - lo) * std::pow(0.7, k));
        for (double t : {spec.sStar - off, spec.sStar + off})
            if (t > lo && t < hi && t > 0.0 && t < 1.0) grid.push_back(t);
        if (off == closestOffset) break;
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

double normalizedGap(double lhs, double rhs) {
    double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    return (rhs - lhs) / scale;
}

} // namespace

ConditionReport check_existence_ratio_tails(const ProblemSpec& spec) {
    ConditionReport rep;
    rep.condition = "existence-ratio-tails";

    TailResult left = assessTail(spec, true, ratioTail);
    TailResult right = assessTail(spec, false, ratioTail);
    rep.limitDiagnostics = left.samples;
    rep.limitDiagnostics.insert(rep.limitDiagnostics.end(), right.samples.begin(),
                                right.samples.end());

    // left condition: liminf of the ratio > -inf; right: limsup < +inf
    auto leftVerdict = [&] {
        switch (left.cls) {
        case TailClass::BoundedStable:
        case TailClass::DivergesPlus: return Verdict::Satisfied;
        case TailClass::DivergesMinus: return Verdict::Violated;
        default: return Verdict::Inconclusive;
        }
    }();
    auto rightVerdict = [&] {
        switch (right.cls) {
        case TailClass::BoundedStable:
        case TailClass::DivergesMinus: return Verdict::Satisfied;
        case TailClass::DivergesPlus: return Verdict::Violated;
        default: return Verdict::Inconclusive;
        }
    }();

    rep.witnesses.push_back({spec.sStar, left.limit, std::string("left tail: ") + to_string(leftVerdict)});
    rep.witnesses.push_back({spec.sStar, right.limit, std::string("right tail: ") + to_string(rightVerdict)});

    if (leftVerdict == Verdict::Satisfied || rightVerdict == Verdict::Satisfied)
        rep.verdict = Verdict::Satisfied;
    else if (leftVerdict == Verdict::Violated && rightVerdict == Verdict::Violated)
        rep.verdict = Verdict::Violated;
    else
        rep.verdict = Verdict::Inconclusive;
    rep.detail = "either one-sided ratio tail bounded on the required side";
    return rep;
}

ConditionReport check_existence_integral_sign(const ProblemSpec& spec) {
    ConditionReport rep;
    rep.condition = "existence-integral-sign";

    IncrementIntegral m(spec);

    double best = kInf, bestT = spec.sStar;
    for (double t : conditionGrid(spec, 0.0, 1.0, 1e-4)) {
        double v = m(t);
        if (v < best) { best = v; bestT = t; }
    }
    // endpoints are admissible probe locations
    for (double t : {0.0, 1.0}) {
        double v = m(t);
        if (v < best) { best = v; bestT = t; }
    }
    rep.witnesses.push_back({bestT, best, "minimizing probe"});
    rep.minMargin = -best;
    rep.verdict = (best <= kMargin) ? Verdict::Satisfied : Verdict::Violated;
    rep.detail = "minimum of the cumulative convection increment over probe points";
    return rep;
}

ConditionReport check_nonexistence_barrier(const ProblemSpec& spec) {
    ConditionReport rep;
    rep.condition = "nonexistence-barrier";

    IncrementIntegral m(spec);
    const double hs = m.hs;
    const double Cp = 1.0 / (spec.pPrime * std::pow(spec.p, spec.pPrime / spec.p));

    double minGap = kInf;
    bool violated = false;
    bool crossFail = false;

    auto gridAll = conditionGrid(spec, 0.0, 1.0, 1e-5);
    for (double t : gridAll) {
        double mv = m(t);
        if (!(mv > 0.0)) {
            violated = true;
            if (rep.witnesses.size() < 8) rep.witnesses.push_back({t, mv, "cumulative increment not positive"});
            continue;
        }
        double dh = hs - spec.h.eval(t, Side::Point);
        double rhsBound = Cp * dh * std::pow(mv, spec.pPrime / spec.p);
        double f;
        try {
            f = eval_f(spec, t, Side::Point);
        } catch (const EvalDomainError&) {
            continue;
        }
        // f < bound right of s*, f > bound left of s*
        double gap = (t > spec.sStar) ? normalizedGap(f, rhsBound) : normalizedGap(rhsBound, f);
        minGap = std::min(minGap, gap);
        if (gap <= kMargin) {
            violated = true;
            if (rep.witnesses.size() < 8)
                rep.witnesses.push_back({t, gap, t > spec.sStar ? "forcing bound fails (right)"
                                                                : "forcing bound fails (left)"});
        }

        // redundant barrier-derivative cross-check
        double Kpow = std::pow(mv / spec.p, spec.pPrime / spec.p);
        double Kprime = spec.pPrime / spec.p * dh * Kpow;
        double rhsK = spec.pPrime * (dh * Kpow - f);
        double gk = (t > spec.sStar) ? normalizedGap(Kprime, rhsK) : normalizedGap(rhsK, Kprime);
        if (gk < -1e-9) crossFail = true;
    }

    rep.minMargin = std::isfinite(minGap) ? minGap : 0.0;
    if (violated) rep.verdict = Verdict::Violated;
    else if (crossFail) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "pointwise bounds hold but the barrier derivative cross-check failed";
    } else {
        rep.verdict = Verdict::Satisfied;
        rep.detail = "cumulative increment positive and both forcing bounds strict";
    }
    return rep;
}

ConditionReport check_necessary_speed(const ProblemSpec& spec, double c) {
    ConditionReport rep;
    rep.condition = "necessary-speed";
    if (!std::isfinite(c)) throw ConfigError("necessary-speed check requires a finite c");

    DerivedQuantities dq = derived_quantities(spec);
    rep.verdict = Verdict::Satisfied;

    auto addWitness = [&](double value, const std::string& note) {
        rep.witnesses.push_back({c, value, note});
    };

    if (!dq.fIntegralConverged) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "forcing integral did not converge";
        return rep;
    }
    const double tolI = 1e-10;
    if (dq.fIntegral > tolI) {
        bool ok = c > dq.hInfGlobal - 1e-12;
        addWitness(dq.hInfGlobal, ok ? "strict lower bound inf h: satisfied"
                                     : "strict lower bound inf h: violated");
        if (!ok) rep.verdict = Verdict::Violated;
    } else if (dq.fIntegral >= -tolI) {
        bool okLo = c >= dq.hInfGlobal - 1e-9;
        bool okHi = c <= dq.hSupGlobal + 1e-9;
        addWitness(dq.hInfGlobal, okLo ? "lower bound inf h: satisfied" : "lower bound inf h: violated");
        addWitness(dq.hSupGlobal, okHi ? "upper bound sup h: satisfied" : "upper bound sup h: violated");
        if (!okLo || !okHi) rep.verdict = Verdict::Violated;
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "forcing integral negative: structural sign assumption broken";
    }

    // informational: bounds the two sub-interval thresholds must obey
    bool front = c <= dq.hAtSStar + 1e-12 && c < dq.HsStar / spec.sStar;
    bool back = c >= dq.hAtSStar - 1e-12 && c > (dq.H1 - dq.HsStar) / (1.0 - spec.sStar);
    addWitness(dq.hAtSStar, front ? "front-threshold bounds: admissible" : "front-threshold bounds: excluded");
    addWitness(dq.hAtSStar, back ? "back-threshold bounds: admissible" : "back-threshold bounds: excluded");
    return rep;
}

ConditionReport check_derivative_nonvanishing(const ProblemSpec& spec) {
    ConditionReport rep;
    rep.condition = "derivative-nonvanishing";

    if (spec.p <= 2.0) {
        rep.verdict = Verdict::Satisfied;
        rep.detail = "automatic for p <= 2";
        return rep;
    }

    // log-log fit of -f against the offset on the last 12 dyadic tail points
    std::vector<double> xs, ys;
    for (int k = 29; k <= 40; ++k) {
        double off = std::ldexp(1.0, -k);
        double t = spec.sStar - off;
        if (t <= 0.0) continue;
        double f;
        try {
            f = eval_f(spec, t, Side::Point);
        } catch (const EvalDomainError&) {
            continue;
        }
        if (!(-f > 0.0)) continue;
        xs.push_back(std::log(off));
        ys.push_back(std::log(-f));
        rep.limitDiagnostics.push_back({t, -f, ""});
    }
    if (xs.size() < 6) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "too few usable tail samples for the exponent fit";
        return rep;
    }

    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - beta * sx) / n;
    double K = std::exp(intercept);
    double maxResid = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        maxResid = std::max(maxResid, std::fabs(ys[i] - (beta * xs[i] + intercept)));

    rep.witnesses.push_back({spec.sStar, beta, "fitted decay exponent"});
    rep.witnesses.push_back({spec.sStar, K, "fitted coefficient"});
    rep.witnesses.push_back({spec.sStar, maxResid, "max log residual"});

    const double threshold = 1.0 / (spec.p - 1.0) - 0.05;
    if (maxResid > 0.05) {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "exponent fit unstable";
    } else if (beta < threshold && K > 0.0) {
        rep.verdict = Verdict::Satisfied;
        rep.detail = "forcing decays slowly enough toward s*";
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.detail = "open case p > 2: decay too fast for the criterion";
    }
    return rep;
}

std::vector<ConditionReport> check_all(const ProblemSpec& spec) {
    return {
        check_existence_ratio_tails(spec),
        check_existence_integral_sign(spec),
        check_nonexistence_barrier(spec),
        check_derivative_nonvanishing(spec),
    };
}

} // namespace travwave
