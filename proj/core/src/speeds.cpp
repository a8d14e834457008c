#include "travwave/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace travwave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(WaveVerdict v) {
    switch (v) {
    case WaveVerdict::UniqueWaveExists: return "uniqueWaveExists";
    case WaveVerdict::NoWaveAnyC: return "noWaveAnyC";
    default: return "inconclusive";
    }
}

namespace {

// terminal value at s* of the relevant one-sided solve, with the integration
// floor tied to the terminal cutoff being tested
double terminalAtSStar(const ProblemSpec& spec, double c, bool front, const SpeedOptions& opt,
                       double cutoff) {
    double floor = std::max(cutoff * 1e-3, 1e-280);
    floor = std::min(floor, opt.integ.absTol);
    IntegratorOptions o = opt.integ.withFloor(floor);
    Trajectory tr = front ? solve_forward_to(spec, c, spec.sStar, o)
                          : solve_backward_to(spec, c, spec.sStar, o);
    return tr.terminalValue();
}

ThresholdResult thresholdImpl(const ProblemSpec& spec, const SpeedBrackets& br, double tol,
                              const SpeedOptions& opt, bool front) {
    ThresholdResult res;
    res.which = front ? ThresholdKind::FrontCF : ThresholdKind::BackCB;

    // Primary bracket [lo, hi]. For the front problem the predicate
    // (trajectory vanishes at s*) holds for small c; for the back problem for
    // large c. `inner` is the predicate-false end.
    double onTrue = front ? br.loFPrimary : br.hiBPrimary;
    double onFalse = front ? br.hiFPrimary : br.loBPrimary;
    res.primaryBracket = {front ? onTrue : onFalse, front ? onFalse : onTrue};

    auto pred = [&](double c, double cutoff) {
        return terminalAtSStar(spec, c, front, opt, cutoff) <= cutoff;
    };

    std::vector<double> ladder = opt.terminalLadder;
    if (ladder.empty()) ladder.push_back(opt.matchTol);
    std::sort(ladder.begin(), ladder.end(), std::greater<double>());

    double prevValue = kInf;
    bool haveValue = false;

    for (double cutoff : ladder) {
        double cTrue = onTrue;
        double cFalse = onFalse;

        // infinite true-side endpoint: expand from the false end
        if (std::isinf(cTrue)) {
            double step = 1.0;
            double probe = cFalse - (front ? step : -step);
            bool found = false;
            for (int k = 0; k < 60; ++k) {
                if (pred(probe, cutoff)) { found = true; break; }
                step *= 2.0;
                probe = cFalse - (front ? step : -step);
            }
            if (!found) {
                res.value = front ? -kInf : kInf;
                res.converged = true;
                res.rungValues.push_back({cutoff, res.value});
                return res;
            }
            cTrue = probe;
        } else if (!pred(cTrue, cutoff)) {
            // analytic existence bound violated at this cutoff: extend a few
            // times before declaring a hard error
            bool rescued = false;
            double step = std::max(1.0, std::fabs(cFalse - cTrue));
            for (int k = 0; k < 8; ++k) {
                cTrue -= (front ? step : -step);
                step *= 2.0;
                if (pred(cTrue, cutoff)) { rescued = true; break; }
            }
            if (!rescued) {
                if (haveValue) break; // keep the shallower rung's value
                throw NumericError(std::string("threshold bisection: trajectory does not vanish ") +
                                   "at s* at the analytic existence bound (" +
                                   (front ? "front" : "back") + " problem)");
            }
        }

        if (pred(cFalse, cutoff)) {
            // predicate holds across the whole admissible range
            res.saturatedAtEndpoint = true;
            res.value = cFalse;
            res.rungValues.push_back({cutoff, res.value});
            if (haveValue && std::fabs(res.value - prevValue) <= std::max(0.5 * tol, 1e-14)) {
                res.converged = true;
                break;
            }
            prevValue = res.value;
            haveValue = true;
            continue;
        }
        res.saturatedAtEndpoint = false;

        // start from the previous rung's flip point: deeper cutoffs only move
        // the flip toward the true side
        if (haveValue && std::isfinite(prevValue)) {
            double candidate = prevValue + (front ? tol : -tol);
            bool inRange = front ? (candidate > cTrue && candidate < cFalse)
                                 : (candidate < cTrue && candidate > cFalse);
            if (inRange && !pred(candidate, cutoff)) cFalse = candidate;
        }

        std::vector<std::array<double, 2>> history;
        int guard = 0;
        while (std::fabs(cFalse - cTrue) > tol && guard++ < 200) {
            double mid = 0.5 * (cTrue + cFalse);
            history.push_back(front ? std::array<double, 2>{cTrue, cFalse}
                                    : std::array<double, 2>{cFalse, cTrue});
            if (pred(mid, cutoff)) cTrue = mid;
            else cFalse = mid;
        }
        double value = 0.5 * (cTrue + cFalse);
        res.bracketHistory = std::move(history);
        res.rungValues.push_back({cutoff, value});
        res.value = value;
        if (haveValue && std::fabs(value - prevValue) <= std::max(0.5 * tol, 1e-14)) {
            res.converged = true;
            break;
        }
        prevValue = value;
        haveValue = true;
    }

    double finalCutoff = res.rungValues.empty() ? opt.matchTol : res.rungValues.back()[0];
    if (std::isfinite(res.value))
        res.terminalValueAtSStar = terminalAtSStar(spec, res.value, front, opt, finalCutoff);
    return res;
}

} // namespace

ThresholdResult threshold_cF(const ProblemSpec& spec, double tol, const SpeedOptions& opt) {
    auto dq = derived_quantities(spec);
    auto br = speed_bounds(spec, dq);
    return thresholdImpl(spec, br, tol, opt, true);
}

ThresholdResult threshold_cB(const ProblemSpec& spec, double tol, const SpeedOptions& opt) {
    auto dq = derived_quantities(spec);
    auto br = speed_bounds(spec, dq);
    return thresholdImpl(spec, br, tol, opt, false);
}

SpeedReport critical_speed(const ProblemSpec& spec, double tol, const SpeedOptions& opt) {
    SpeedReport rep;
    rep.derived = derived_quantities(spec);
    rep.brackets = speed_bounds(spec, rep.derived);

    const double thrTol = std::max(tol, 1e-5);
    rep.front = thresholdImpl(spec, rep.brackets, thrTol, opt, true);
    rep.back = thresholdImpl(spec, rep.brackets, thrTol, opt, false);
    rep.cF = rep.front.value;
    rep.cB = rep.back.value;
    rep.cFConverged = rep.front.converged;
    rep.cBConverged = rep.back.converged;

    if (std::isfinite(rep.cF) && std::isfinite(rep.cB) && rep.cFConverged && rep.cBConverged &&
        rep.cB - rep.cF <= 2.0 * tol) {
        rep.verdict = WaveVerdict::NoWaveAnyC;
        return rep;
    }

    // classification bisection on (cF, cB)
    std::map<long long, Classification> memo;
    const double quantum = std::max(tol / 10.0, 1e-15);
    auto classify = [&](double c) -> const Classification& {
        long long key = llround(c / quantum);
        auto it = memo.find(key);
        if (it == memo.end()) {
            it = memo.emplace(key, classify_speed(spec, c, opt.integ, opt.matchTol)).first;
            rep.evidence.push_back({c, it->second.kind});
        }
        return it->second;
    };

    double lo = rep.cF, hi = rep.cB;
    double center = rep.derived.hAtSStar;
    if (!std::isfinite(lo)) {
        double step = 1.0;
        lo = std::min(center, std::isfinite(hi) ? hi : center) - step;
        for (int k = 0; k < 60; ++k) {
            ++rep.iterations;
            if (classify(lo).kind == SpeedClass::A0) break;
            step *= 2.0;
            lo -= step;
        }
    }
    if (!std::isfinite(hi)) {
        double step = 1.0;
        hi = std::max(center, lo) + step;
        for (int k = 0; k < 60; ++k) {
            ++rep.iterations;
            if (classify(hi).kind == SpeedClass::A1) break;
            step *= 2.0;
            hi += step;
        }
    }
    if (!(lo < hi)) {
        lo = std::min(lo, center) - 1.0;
        hi = std::max(hi, center) + 1.0;
    }

    std::optional<double> cStar;
    while (hi - lo > tol) {
        if (rep.iterations++ >= opt.iterationBudget) {
            rep.verdict = WaveVerdict::Inconclusive;
            rep.warnings.push_back("iteration budget exhausted before the bracket collapsed");
            return rep;
        }
        double mid = 0.5 * (lo + hi);
        const Classification& cls = classify(mid);
        if (cls.kind == SpeedClass::A0) lo = mid;
        else if (cls.kind == SpeedClass::A1) hi = mid;
        else if (cls.kind == SpeedClass::CriticalCandidate) {
            cStar = mid;
            break;
        } else { // DegenerateAtSStar
            rep.verdict = WaveVerdict::NoWaveAnyC;
            rep.warnings.push_back("both trajectories die at s*: degenerate threshold gap");
            return rep;
        }
    }
    if (!cStar) cStar = 0.5 * (lo + hi);

    rep.cStar = cStar;
    rep.verdict = WaveVerdict::UniqueWaveExists;

    // necessary-speed sanity (attached as warnings, not failures)
    const auto& dq = rep.derived;
    if (dq.fIntegralConverged) {
        if (dq.fIntegral > 1e-10 && !(*cStar > dq.hInfGlobal))
            rep.warnings.push_back("speed violates the strict lower necessary bound inf h");
        if (dq.fIntegral >= -1e-10 && *cStar < dq.hInfGlobal - 1e-9)
            rep.warnings.push_back("speed below inf h");
        if (std::fabs(dq.fIntegral) <= 1e-10 &&
            (*cStar < dq.hInfGlobal - 1e-6 || *cStar > dq.hSupGlobal + 1e-6))
            rep.warnings.push_back("speed outside [inf h, sup h] in the balanced case");
    }
    if (*cStar <= rep.brackets.cStarLo || *cStar >= rep.brackets.cStarHi)
        rep.warnings.push_back("speed outside the admissible analytic window");

    return rep;
}

} // namespace travwave
