#pragma once

#include <cstdio>
#include <string>

#include "travwave/config.hpp"

namespace fixtures {

using travwave::ProblemSpec;

inline ProblemSpec fromToml(const std::string& text) {
    return travwave::parse_problem_text(text, false);
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string simpleProblem(double p, double sStar, const std::string& d,
                                 const std::string& g, const std::string& h) {
    return "p = " + num(p) + "\ns_star = " + num(sStar) +
           "\n[d]\nbreakpoints=[0.0,1.0]\nsegments=[\"" + d +
           "\"]\n[g]\nbreakpoints=[0.0,1.0]\nsegments=[\"" + g +
           "\"]\n[h]\nbreakpoints=[0.0,1.0]\nsegments=[\"" + h + "\"]\n";
}

/// cubic bistable reaction, unit diffusion, constant convection
inline ProblemSpec huxley(double a, double kappa = 0.0) {
    return fromToml(simpleProblem(2.0, a, "1", "t*(t-" + num(a) + ")*(1-t)", num(kappa)));
}

inline double huxleySpeed(double a) { return (1.0 - 2.0 * a) / std::sqrt(2.0); }

/// odd-symmetric reaction; the critical speed is exactly 0
inline ProblemSpec symmetricCubic(const std::string& d = "1") {
    return fromToml(simpleProblem(2.0, 0.5, d, "t*(t-0.5)*(1-t)", "0"));
}

/// the barrier-nonexistence fixture: decreasing convection, cubed pinning
inline ProblemSpec nonex(double hShift = 0.0) {
    return fromToml(
        simpleProblem(2.0, 0.5, "1", "t*(1-t)*(t-0.5)^3/16", num(hShift) + "+0.5-t"));
}

/// diffusion jumping 1 -> 4 at u = 1/2
inline ProblemSpec djump() {
    return fromToml("p = 2.0\ns_star = 0.25\n"
                    "[d]\nbreakpoints=[0.0,0.5,1.0]\nsegments=[\"1\",\"4\"]\n"
                    "[g]\nbreakpoints=[0.0,1.0]\nsegments=[\"t*(t-0.25)*(1-t)\"]\n"
                    "[h]\nbreakpoints=[0.0,1.0]\nsegments=[\"0\"]\n");
}

/// degenerate diffusion d(t) = t (vanishes at the invaded state)
inline ProblemSpec degenerateD() {
    return fromToml(simpleProblem(2.0, 0.25, "t", "t*(t-0.25)*(1-t)", "0"));
}

/// forcing with an exact power tail -(s*-t)^beta near s* (ramped to zero at
/// the outer equilibria to keep the reaction continuous)
inline ProblemSpec powerTail(double p, double beta) {
    std::string b = num(beta);
    return fromToml("p = " + num(p) +
                    "\ns_star = 0.5\n"
                    "[d]\nbreakpoints=[0.0,1.0]\nsegments=[\"1\"]\n"
                    "[g]\nbreakpoints=[0.0,0.1,0.5,0.9,1.0]\nsegments=["
                    "\"-(t/0.1)*pow(0.5-t," + b + ")\","
                    "\"-pow(0.5-t," + b + ")\","
                    "\"pow(t-0.5," + b + ")\","
                    "\"((1-t)/0.1)*pow(t-0.5," + b + ")\"]\n"
                    "[h]\nbreakpoints=[0.0,1.0]\nsegments=[\"0\"]\n");
}

/// reaction vanishing identically on a leading subinterval
inline ProblemSpec vanishingStart() {
    return fromToml("p = 2.0\ns_star = 0.6\n"
                    "[d]\nbreakpoints=[0.0,1.0]\nsegments=[\"1\"]\n"
                    "[g]\nbreakpoints=[0.0,0.3,0.6,1.0]\nsegments=["
                    "\"0\",\"-(t-0.3)*(0.6-t)\",\"(t-0.6)*(1-t)\"]\n"
                    "[h]\nbreakpoints=[0.0,1.0]\nsegments=[\"1\"]\n");
}

} // namespace fixtures
