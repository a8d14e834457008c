#include "travwave/quantities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace travwave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kTailFirst = 8;
constexpr int kTailLast = 40;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    default: return "inconclusive";
    }
}

Verdict ValidationReport::overall() const {
    Verdict out = Verdict::Satisfied;
    for (const auto& it : items) {
        if (it.verdict == Verdict::Violated) return Verdict::Violated;
        if (it.verdict == Verdict::Inconclusive) out = Verdict::Inconclusive;
    }
    return out;
}

const ValidationItem* ValidationReport::find(const std::string& id) const {
    for (const auto& it : items)
        if (it.id == id) return &it;
    return nullptr;
}

double eval_f(const ProblemSpec& spec, double t, Side side) {
    double dv = spec.d.eval(t, side);
    double gv = spec.g.eval(t, side);
    if (dv < 0.0) throw EvalDomainError("diffusion coefficient negative", t);
    double e = 1.0 / (spec.p - 1.0);
    double w = (e == 1.0) ? dv : std::pow(dv, e);
    return w * gv;
}

// ---------------------------------------------------------------------------
// CoefficientTable
// ---------------------------------------------------------------------------

CoefficientTable::CoefficientTable(const ProblemSpec& spec)
    : spec_(&spec), breaks_(spec.breakUnion), fExp_(1.0 / (spec.p - 1.0)) {
    segs_.resize(breaks_.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        double mid = 0.5 * (breaks_[i] + breaks_[i + 1]);
        segs_[i] = {spec.d.segmentIndex(mid), spec.g.segmentIndex(mid), spec.h.segmentIndex(mid)};
    }
}

std::size_t CoefficientTable::macroSegmentOf(double t, bool preferLeft) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= segs_.size()) i = segs_.size() - 1;
    if (preferLeft && i > 0 && t == breaks_[i]) --i;
    return i;
}

double CoefficientTable::d(double t, std::size_t m) const {
    return spec_->d.evalInSegment(t, segs_[m].dSeg);
}
double CoefficientTable::g(double t, std::size_t m) const {
    return spec_->g.evalInSegment(t, segs_[m].gSeg);
}
double CoefficientTable::h(double t, std::size_t m) const {
    return spec_->h.evalInSegment(t, segs_[m].hSeg);
}
double CoefficientTable::f(double t, std::size_t m) const {
    double dv = d(t, m);
    if (dv < 0.0) throw EvalDomainError("diffusion coefficient negative", t);
    double w = (fExp_ == 1.0) ? dv : std::pow(dv, fExp_);
    return w * g(t, m);
}

// ---------------------------------------------------------------------------
// CumulativeH
// ---------------------------------------------------------------------------

CumulativeH::CumulativeH(const ProblemSpec& spec) : spec_(&spec), breaks_(spec.breakUnion) {
    cum_.assign(breaks_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
        auto piece = integrate([&](double t) { return spec.h.eval(t, Side::Right); },
                               breaks_[i], breaks_[i + 1], 1e-13, 1e-13);
        cum_[i + 1] = cum_[i] + piece.value;
    }
}

double CumulativeH::operator()(double t) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i + 1 >= breaks_.size()) i = breaks_.size() - 2;
    if (t == breaks_[i]) return cum_[i];
    auto piece = integrate([&](double x) { return spec_->h.eval(x, Side::Right); },
                           breaks_[i], t, 1e-13, 1e-13);
    return cum_[i] + piece.value;
}

// ---------------------------------------------------------------------------
// validate_problem
// ---------------------------------------------------------------------------

namespace {

struct SampleStats {
    double minVal = kInf, maxVal = -kInf;
    double minArg = 0, maxArg = 0;
    long evalErrors = 0;
    double firstErrorT = 0;
    std::string firstErrorWhat;
};

// dense per-segment sampling of a coefficient restricted to (lo,hi)
SampleStats sampleRange(const PiecewiseFunction& pf, double lo, double hi, int perSegment) {
    SampleStats st;
    const auto& bks = pf.breakpoints();
    for (std::size_t s = 0; s + 1 < bks.size(); ++s) {
        double a = std::max(bks[s], lo), b = std::min(bks[s + 1], hi);
        if (!(a < b)) continue;
        for (int i = 1; i < perSegment; ++i) {
            double t = a + (b - a) * i / perSegment;
            double v;
            try {
                v = pf.segment(s).eval(t);
            } catch (const EvalDomainError& e) {
                if (st.evalErrors++ == 0) { st.firstErrorT = t; st.firstErrorWhat = e.what(); }
                continue;
            }
            if (v < st.minVal) { st.minVal = v; st.minArg = t; }
            if (v > st.maxVal) { st.maxVal = v; st.maxArg = t; }
        }
    }
    return st;
}

void checkSign(ValidationReport& rep, const ProblemSpec& spec, bool negativeSide) {
    const double lo = negativeSide ? 0.0 : spec.sStar;
    const double hi = negativeSide ? spec.sStar : 1.0;
    ValidationItem item;
    item.id = negativeSide ? "H1.sign-left" : "H1.sign-right";

    double scale = 0.0;
    long flat = 0, total = 0;
    bool violated = false;
    const auto& bks = spec.g.breakpoints();
    for (std::size_t s = 0; s + 1 < bks.size(); ++s) {
        double a = std::max(bks[s], lo), b = std::min(bks[s + 1], hi);
        if (!(a < b)) continue;
        const int n = 4096;
        for (int i = 1; i < n; ++i) {
            double t = a + (b - a) * i / n;
            double v;
            try {
                v = spec.g.segment(s).eval(t);
            } catch (const EvalDomainError&) {
                item.witnesses.push_back({t, 0.0, "evaluation error"});
                violated = true;
                continue;
            }
            ++total;
            scale = std::max(scale, std::fabs(v));
            double margin = 1e-12 * std::max(scale, 1e-300);
            bool wrong = negativeSide ? (v > margin) : (v < -margin);
            // the reaction legitimately vanishes toward 0, s*, 1
            double edge = std::min(std::fabs(t - lo), std::fabs(hi - t));
            if (wrong && edge > 1e-6) {
                violated = true;
                if (item.witnesses.size() < 8)
                    item.witnesses.push_back({t, v, "wrong sign"});
            }
            if (std::fabs(v) <= margin && edge > 1e-3) ++flat;
        }
    }
    if (violated) item.verdict = Verdict::Violated;
    else if (total > 0 && flat > total / 20) {
        item.verdict = Verdict::Inconclusive;
        item.detail = "reaction nearly vanishes on a set of positive measure";
    } else item.verdict = Verdict::Satisfied;
    rep.items.push_back(std::move(item));
}

} // namespace

ValidationReport validate_problem(const ProblemSpec& spec) {
    ValidationReport rep;

    // H1: zeros of g at 0, s*, 1
    {
        ValidationItem item;
        item.id = "H1.zeros";
        item.verdict = Verdict::Satisfied;
        auto st = sampleRange(spec.g, 0.0, 1.0, 512);
        double scale = std::max({std::fabs(st.minVal), std::fabs(st.maxVal), 1e-12});
        for (double t : {0.0, spec.sStar, 1.0}) {
            double v;
            try {
                v = spec.g.eval(t, Side::Point);
            } catch (const EvalDomainError&) {
                item.verdict = Verdict::Violated;
                item.witnesses.push_back({t, 0.0, "evaluation error"});
                continue;
            }
            if (std::fabs(v) > 1e-9 * scale) {
                item.verdict = Verdict::Violated;
                item.witnesses.push_back({t, v, "reaction does not vanish"});
            }
        }
        rep.items.push_back(std::move(item));
    }

    checkSign(rep, spec, true);
    checkSign(rep, spec, false);

    // H1: continuity of g across its interior breakpoints
    {
        ValidationItem item;
        item.id = "H1.continuity";
        item.verdict = Verdict::Satisfied;
        const auto& bks = spec.g.breakpoints();
        auto st = sampleRange(spec.g, 0.0, 1.0, 256);
        double scale = std::max({std::fabs(st.minVal), std::fabs(st.maxVal), 1.0});
        for (std::size_t k = 1; k + 1 < bks.size(); ++k) {
            bool stL = false, stR = false;
            double L = spec.g.oneSidedLimit(k, Side::Left, &stL);
            double R = spec.g.oneSidedLimit(k, Side::Right, &stR);
            if (!stL || !stR) {
                item.verdict = Verdict::Inconclusive;
                item.witnesses.push_back({bks[k], L - R, "limit did not stabilize"});
            } else if (std::fabs(L - R) > 1e-8 * scale) {
                item.verdict = Verdict::Violated;
                item.witnesses.push_back({bks[k], L - R, "one-sided limits differ"});
            }
        }
        rep.items.push_back(std::move(item));
    }

    // H2: d nonnegative, strictly positive on (0,1), lower semicontinuous
    {
        ValidationItem item;
        item.id = "H2.positivity";
        item.verdict = Verdict::Satisfied;
        auto st = sampleRange(spec.d, 0.0, 1.0, 4096);
        if (st.minVal < 0.0) {
            item.verdict = Verdict::Violated;
            item.witnesses.push_back({st.minArg, st.minVal, "negative diffusion"});
        }
        // interior strict positivity, away from the allowed endpoint degeneracy
        auto stInt = sampleRange(spec.d, 1e-6, 1.0 - 1e-6, 4096);
        if (stInt.minVal <= 0.0) {
            item.verdict = Verdict::Violated;
            item.witnesses.push_back({stInt.minArg, stInt.minVal, "diffusion vanishes in the interior"});
        }
        const auto& bks = spec.d.breakpoints();
        for (std::size_t k = 1; k + 1 < bks.size(); ++k) {
            if (spec.d.pointValue(k) <= 0.0 && spec.d.pointValueDeclared(k)) {
                item.verdict = Verdict::Violated;
                item.witnesses.push_back({bks[k], spec.d.pointValue(k), "declared value not positive"});
            }
        }
        rep.items.push_back(std::move(item));
    }
    {
        ValidationItem item;
        item.id = "H2.lower-semicontinuity";
        item.verdict = Verdict::Satisfied;
        const auto& bks = spec.d.breakpoints();
        for (std::size_t k = 1; k + 1 < bks.size(); ++k) {
            bool stL = false, stR = false;
            double L = spec.d.oneSidedLimit(k, Side::Left, &stL);
            double R = spec.d.oneSidedLimit(k, Side::Right, &stR);
            double v = spec.d.pointValue(k);
            double scale = std::max({std::fabs(L), std::fabs(R), 1.0});
            if (!stL || !stR) {
                item.verdict = Verdict::Inconclusive;
                item.witnesses.push_back({bks[k], v, "limit did not stabilize"});
            } else if (v > std::min(L, R) + 1e-10 * scale) {
                item.verdict = Verdict::Violated;
                item.witnesses.push_back({bks[k], v - std::min(L, R), "value exceeds one-sided minimum"});
            }
        }
        rep.items.push_back(std::move(item));
    }

    // H2: f integrable and its definite integral is >= 0
    {
        ValidationItem item;
        item.id = "H2.f-integrable";
        auto absF = integrate_singular(
            [&](double t) { return std::fabs(eval_f(spec, t, Side::Right)); }, 0.0, 1.0,
            true, true, 1e-10, 1e-8);
        item.verdict = absF.converged ? Verdict::Satisfied : Verdict::Inconclusive;
        item.detail = "L1 norm " + std::to_string(absF.value);
        rep.items.push_back(std::move(item));

        QuadResult total{0, 0, true, 0};
        const auto& bu = spec.breakUnion;
        for (std::size_t i = 0; i + 1 < bu.size(); ++i) {
            auto piece = integrate_singular(
                [&](double t) { return eval_f(spec, t, Side::Right); }, bu[i], bu[i + 1],
                i == 0, i + 2 == bu.size(), 1e-11, 1e-10);
            total.value += piece.value;
            total.errorEstimate += piece.errorEstimate;
            total.converged = total.converged && piece.converged;
        }
        rep.fIntegral = total.value;
        rep.fIntegralConverged = total.converged;

        ValidationItem sign;
        sign.id = "H2.f-integral-sign";
        sign.detail = "definite integral of f";
        sign.witnesses.push_back({0.0, total.value, "integral value"});
        if (!total.converged) sign.verdict = Verdict::Inconclusive;
        else sign.verdict = (total.value >= -1e-10) ? Verdict::Satisfied : Verdict::Violated;
        rep.items.push_back(std::move(sign));
    }

    // H3: h bounded, continuous at s*
    {
        ValidationItem item;
        item.id = "H3.bounded";
        item.verdict = Verdict::Satisfied;
        auto st = sampleRange(spec.h, 0.0, 1.0, 4096);
        if (st.evalErrors > 0) {
            item.verdict = Verdict::Violated;
            item.witnesses.push_back({st.firstErrorT, 0.0, st.firstErrorWhat});
        } else if (std::max(std::fabs(st.minVal), std::fabs(st.maxVal)) > 1e12) {
            item.verdict = Verdict::Violated;
            item.witnesses.push_back({st.maxArg, st.maxVal, "convection unbounded"});
        }
        rep.items.push_back(std::move(item));

        ValidationItem cont;
        cont.id = "H3.continuous-at-sstar";
        cont.verdict = Verdict::Satisfied;
        std::size_t bk = spec.h.breakpointIndexOf(spec.sStar);
        if (bk != PiecewiseFunction::npos && bk > 0 && bk + 1 < spec.h.breakpoints().size()) {
            bool stL = false, stR = false;
            double L = spec.h.oneSidedLimit(bk, Side::Left, &stL);
            double R = spec.h.oneSidedLimit(bk, Side::Right, &stR);
            double scale = std::max({std::fabs(L), std::fabs(R), 1.0});
            if (!stL || !stR) cont.verdict = Verdict::Inconclusive;
            else if (std::fabs(L - R) > 1e-8 * scale) {
                cont.verdict = Verdict::Violated;
                cont.witnesses.push_back({spec.sStar, L - R, "convection jumps at s*"});
            }
        }
        rep.items.push_back(std::move(cont));
    }

    return rep;
}

// ---------------------------------------------------------------------------
// sup/liminf ratio quantities
// ---------------------------------------------------------------------------

namespace {

// r(t) = -f/(s*-t)^{p'-1} left of s*, f/(t-s*)^{p'-1} right of it
double ratioAt(const ProblemSpec& spec, double t, bool leftSide) {
    double den = leftSide ? (spec.sStar - t) : (t - spec.sStar);
    if (den <= 0.0) return -kInf;
    double f = eval_f(spec, t, Side::Point);
    double num = leftSide ? -f : f;
    return num / std::pow(den, spec.pPrime - 1.0);
}

SupEstimate supRatio(const ProblemSpec& spec, bool leftSide) {
    const double lo = leftSide ? 0.0 : spec.sStar;
    const double hi = leftSide ? spec.sStar : 1.0;
    SupEstimate best;
    best.value = -kInf;

    auto consider = [&](double t) {
        if (t <= lo || t >= hi) return;
        double r;
        try {
            r = ratioAt(spec, t, leftSide);
        } catch (const EvalDomainError&) {
            return;
        }
        if (r > best.value) { best.value = r; best.argmax = t; }
    };

    for (std::size_t s = 0; s + 1 < spec.breakUnion.size(); ++s) {
        double a = std::max(spec.breakUnion[s], lo), b = std::min(spec.breakUnion[s + 1], hi);
        if (!(a < b)) continue;
        const int n = 8192;
        for (int i = 1; i < n; ++i) consider(a + (b - a) * i / n);
    }
    // log-refined cluster toward s*
    for (int k = 4; k <= 48; ++k) {
        double off = std::ldexp(hi - lo, -k);
        consider(leftSide ? spec.sStar - off : spec.sStar + off);
    }

    if (best.value > 1e12) {
        best.value = kInf;
        best.finite = false;
        return best;
    }

    // golden-section polish around the best sample
    double span = (hi - lo) / 8192.0;
    double a = std::max(lo + 1e-300, best.argmax - span), b = std::min(hi - 1e-300, best.argmax + span);
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    auto val = [&](double t) {
        try { return ratioAt(spec, t, leftSide); } catch (const EvalDomainError&) { return -kInf; }
    };
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
        if (f1 < f2) { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = val(x2); }
        else { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = val(x1); }
    }
    double mid = 0.5 * (a + b), fm = val(mid);
    if (fm > best.value) { best.value = fm; best.argmax = mid; }
    return best;
}

LimitEstimate liminfRatio(const ProblemSpec& spec, bool leftSide) {
    LimitEstimate est;
    std::vector<double> vals;
    for (int k = kTailFirst; k <= kTailLast; ++k) {
        double off = std::ldexp(1.0, -k);
        double t = leftSide ? spec.sStar - off : spec.sStar + off;
        if (t <= 0.0 || t >= 1.0) continue;
        double r;
        try {
            r = ratioAt(spec, t, leftSide);
        } catch (const EvalDomainError&) {
            continue;
        }
        vals.push_back(r);
        est.tail.push_back({t, r, ""});
    }
    if (vals.size() < 6) {
        est.value = 0.0;
        est.converged = false;
        return est;
    }
    std::size_t nTail = std::min<std::size_t>(12, vals.size());
    double tailMin = kInf;
    for (std::size_t i = vals.size() - nTail; i < vals.size(); ++i) tailMin = std::min(tailMin, vals[i]);
    est.value = tailMin;

    if (vals.back() > 1e12) {
        est.value = kInf;
        est.converged = true; // certified divergence: the tail grows beyond 1e12
        return est;
    }
    std::size_t nConv = std::min<std::size_t>(8, vals.size());
    double mn = kInf, mx = -kInf;
    for (std::size_t i = vals.size() - nConv; i < vals.size(); ++i) {
        mn = std::min(mn, vals[i]);
        mx = std::max(mx, vals[i]);
    }
    double scale = std::max({std::fabs(mn), std::fabs(mx), 1e-12});
    est.converged = (mx - mn) <= 1e-2 * scale;
    return est;
}

} // namespace

void sup_ratios(const ProblemSpec& spec, DerivedQuantities& dq) {
    dq.muTilde = supRatio(spec, true);
    dq.muHat = supRatio(spec, false);
    dq.nuTilde = liminfRatio(spec, true);
    dq.nuHat = liminfRatio(spec, false);
    // sup >= liminf must survive sampling noise
    if (dq.nuTilde.converged && std::isfinite(dq.nuTilde.value))
        dq.muTilde.value = std::max(dq.muTilde.value, dq.nuTilde.value);
    if (dq.nuHat.converged && std::isfinite(dq.nuHat.value))
        dq.muHat.value = std::max(dq.muHat.value, dq.nuHat.value);
    if (std::isinf(dq.nuTilde.value)) dq.muTilde = {kInf, dq.muTilde.argmax, false};
    if (std::isinf(dq.nuHat.value)) dq.muHat = {kInf, dq.muHat.argmax, false};
}

DerivedQuantities derived_quantities(const ProblemSpec& spec) {
    DerivedQuantities dq;
    dq.p = spec.p;
    dq.pPrime = spec.pPrime;
    dq.sStar = spec.sStar;
    dq.kappa = std::pow(spec.pPrime, 1.0 / spec.pPrime) * std::pow(spec.p, 1.0 / spec.p);
    dq.hAtSStar = spec.h.eval(spec.sStar, Side::Point);

    // inf over [0,s*] / sup over [s*,1] of h: dense samples + point values
    double hm = kInf, hM = -kInf;
    const auto& bks = spec.h.breakpoints();
    for (std::size_t s = 0; s + 1 < bks.size(); ++s) {
        for (int half = 0; half < 2; ++half) {
            double lo = half == 0 ? 0.0 : spec.sStar;
            double hi = half == 0 ? spec.sStar : 1.0;
            double a = std::max(bks[s], lo), b = std::min(bks[s + 1], hi);
            if (!(a < b)) continue;
            const int n = 8192;
            for (int i = 0; i <= n; ++i) {
                double t = a + (b - a) * i / n;
                double v = spec.h.segment(s).eval(t);
                if (half == 0) hm = std::min(hm, v);
                else hM = std::max(hM, v);
            }
        }
    }
    for (std::size_t k = 0; k < bks.size(); ++k) {
        if (!spec.h.pointValueKnown(k)) continue;
        double v = spec.h.pointValue(k);
        if (bks[k] <= spec.sStar) hm = std::min(hm, v);
        if (bks[k] >= spec.sStar) hM = std::max(hM, v);
    }
    dq.hm = std::min(hm, dq.hAtSStar);
    dq.hM = std::max(hM, dq.hAtSStar);

    auto hAll = sampleRange(spec.h, 0.0, 1.0, 8192);
    dq.hInfGlobal = std::min(hAll.minVal, dq.hm);
    dq.hSupGlobal = std::max(hAll.maxVal, dq.hM);
    for (std::size_t k = 0; k < bks.size(); ++k) {
        if (!spec.h.pointValueKnown(k)) continue;
        dq.hInfGlobal = std::min(dq.hInfGlobal, spec.h.pointValue(k));
        dq.hSupGlobal = std::max(dq.hSupGlobal, spec.h.pointValue(k));
    }

    CumulativeH H(spec);
    dq.HsStar = H(spec.sStar);
    dq.H1 = H(1.0);

    auto rep = validate_problem(spec);
    dq.fIntegral = rep.fIntegral;
    dq.fIntegralConverged = rep.fIntegralConverged;

    sup_ratios(spec, dq);
    return dq;
}

SpeedBrackets speed_bounds(const ProblemSpec& spec, const DerivedQuantities& dq) {
    SpeedBrackets b{};
    const double invPp = 1.0 / dq.pPrime;
    auto kpow = [&](double x) { return std::isinf(x) ? kInf : dq.kappa * std::pow(std::max(x, 0.0), invPp); };

    b.loFPrimary = std::isinf(dq.muTilde.value) ? -kInf : dq.hm - kpow(dq.muTilde.value);
    b.hiFPrimary = std::min(dq.hAtSStar, dq.HsStar / spec.sStar);
    b.loF = b.loFPrimary;
    b.hiF = b.hiFPrimary;
    if (dq.nuTilde.converged) b.hiF = std::min(b.hiF, dq.hAtSStar - kpow(dq.nuTilde.value));

    b.loBPrimary = std::max(dq.hAtSStar, (dq.H1 - dq.HsStar) / (1.0 - spec.sStar));
    b.hiBPrimary = std::isinf(dq.muHat.value) ? kInf : dq.hM + kpow(dq.muHat.value);
    b.loB = b.loBPrimary;
    b.hiB = b.hiBPrimary;
    if (dq.nuHat.converged) b.loB = std::max(b.loB, dq.hAtSStar + kpow(dq.nuHat.value));

    b.cStarLo = b.loFPrimary;
    b.cStarHi = b.hiBPrimary;
    return b;
}

} // namespace travwave
