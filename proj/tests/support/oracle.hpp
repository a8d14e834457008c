#pragma once

// Independent brute-force oracle for the first-order shooting problem:
// fixed-step classical RK4, Simpson bootstrap, linear event location. It
// deliberately shares nothing with the production integrator or quadrature.

#include <cmath>
#include <optional>
#include <vector>

#include "travwave/problem.hpp"

namespace oracle {

using travwave::ProblemSpec;
using travwave::Side;

inline double forcing(const ProblemSpec& spec, double t) {
    double dv = spec.d.eval(t, Side::Point);
    double gv = spec.g.eval(t, Side::Point);
    double e = 1.0 / (spec.p - 1.0);
    return (e == 1.0 ? dv : std::pow(dv, e)) * gv;
}

inline double convection(const ProblemSpec& spec, double t) {
    return spec.h.eval(t, Side::Point);
}

inline double simpson(const ProblemSpec& spec, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n, s = forcing(spec, a) + forcing(spec, b);
    for (int i = 1; i < n; ++i) s += forcing(spec, a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

struct IvpResult {
    double terminal = 0.0;
    std::optional<double> exitT;
    std::vector<std::pair<double, double>> nodes;
};

/// forward solve on [0, tEnd] in the mirrored-or-not coordinate; `mirror`
/// turns it into the backward problem of the original spec
inline IvpResult solveRaw(const ProblemSpec& spec, double c, double tEnd, double hStep,
                          bool mirror) {
    auto F = [&](double tau) { return mirror ? -forcing(spec, 1.0 - tau) : forcing(spec, tau); };
    auto Hc = [&](double tau) {
        return mirror ? -convection(spec, 1.0 - tau) : convection(spec, tau);
    };
    double ce = mirror ? -c : c;
    double pp = spec.pPrime, invP = 1.0 / spec.p;
    auto rhs = [&](double tau, double y) {
        double yp = y > 0 ? y : 0;
        return pp * ((ce - Hc(tau)) * std::pow(yp, invP) - F(tau));
    };

    IvpResult res;
    const double tb = 1e-7;
    double y;
    {
        // Simpson bootstrap of the leading-order start
        int n = 200;
        double h = tb / n, s = 0.0; // forcing(0) may not evaluate; trapezoid from h
        for (int i = 1; i < n; ++i) s += F(i * h) * (i % 2 ? 4.0 : 2.0);
        s += F(tb);
        y = -pp * s * h / 3.0;
        if (y < 0) y = 0;
    }
    double tau = tb;
    res.nodes.push_back({tau, y});

    // split exactly at the coefficient breakpoints
    std::vector<double> cuts;
    for (double b : spec.breakUnion) {
        double x = mirror ? 1.0 - b : b;
        if (x > tb && x < tEnd) cuts.push_back(x);
    }
    cuts.push_back(tEnd);
    std::sort(cuts.begin(), cuts.end());

    for (double B : cuts) {
        int n = std::max(8, static_cast<int>(std::ceil((B - tau) / hStep)));
        double h = (B - tau) / n;
        for (int i = 0; i < n; ++i) {
            double k1 = rhs(tau, y);
            double k2 = rhs(tau + h / 2, y + h / 2 * k1);
            double k3 = rhs(tau + h / 2, y + h / 2 * k2);
            double k4 = rhs(tau + h, y + h * k3);
            double yn = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            double tn = tau + h;
            if (yn <= 0.0 && y > 0.0) {
                double frac = y / (y - yn);
                double te = tau + frac * h;
                if (-F(te) < 0.0) { // decreasing through zero: terminal
                    res.exitT = mirror ? 1.0 - te : te;
                    res.terminal = 0.0;
                    res.nodes.push_back({te, 0.0});
                    return res;
                }
                yn = 0.0;
            }
            y = yn < 0.0 ? 0.0 : yn;
            tau = tn;
            res.nodes.push_back({tau, y});
        }
    }
    res.terminal = y;
    return res;
}

inline IvpResult solveForward(const ProblemSpec& spec, double c, double tEnd = 1.0,
                              double hStep = 2e-5) {
    return solveRaw(spec, c, tEnd, hStep, false);
}

inline IvpResult solveBackward(const ProblemSpec& spec, double c, double tStop = 0.0,
                               double hStep = 2e-5) {
    IvpResult r = solveRaw(spec, c, 1.0 - tStop, hStep, true);
    for (auto& [t, y] : r.nodes) t = 1.0 - t;
    return r;
}

/// threshold bisection with the plain terminal-value predicate
inline double thresholdFront(const ProblemSpec& spec, double lo, double hi, double matchTol,
                             int iters = 40, double hStep = 2e-5) {
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        double term = solveForward(spec, mid, spec.sStar, hStep).terminal;
        (term <= matchTol ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// dense-grid maximizer used to cross-check the sup-ratio machinery
template <typename F>
double gridSup(F&& f, double a, double b, int n) {
    double best = -1e308;
    for (int i = 1; i < n; ++i) {
        double t = a + (b - a) * i / n;
        double v = f(t);
        if (v > best) best = v;
    }
    return best;
}

} // namespace oracle
