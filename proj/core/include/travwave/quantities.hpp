#pragma once

#include <string>
#include <vector>

#include "travwave/problem.hpp"
#include "travwave/quadrature.hpp"

namespace travwave {

enum class Verdict { Satisfied, Violated, Inconclusive };

const char* to_string(Verdict v);

struct Witness {
    double t = 0.0;
    double value = 0.0;
    std::string note;
};

struct ValidationItem {
    std::string id;
    Verdict verdict = Verdict::Inconclusive;
    std::string detail;
    std::vector<Witness> witnesses;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    double fIntegral = 0.0;     // value of the structural sign integral
    bool fIntegralConverged = false;
    Verdict overall() const;
    const ValidationItem* find(const std::string& id) const;
};

/// f(t) = d(t)^{1/(p-1)} g(t), the forcing of the first-order equation.
double eval_f(const ProblemSpec& spec, double t, Side side = Side::Point);

/// Hot-path coefficient evaluator over the union breakpoint grid; callers
/// track the current macro segment so evaluation never searches or straddles
/// a discontinuity.
class CoefficientTable {
public:
    explicit CoefficientTable(const ProblemSpec& spec);

    const std::vector<double>& breaks() const { return breaks_; }
    std::size_t macroSegmentOf(double t, bool preferLeft = false) const;

    double f(double t, std::size_t macroSeg) const;
    double h(double t, std::size_t macroSeg) const;
    double d(double t, std::size_t macroSeg) const;
    double g(double t, std::size_t macroSeg) const;
    const ProblemSpec& spec() const { return *spec_; }

private:
    const ProblemSpec* spec_;
    std::vector<double> breaks_;
    struct Entry { std::size_t dSeg, gSeg, hSeg; };
    std::vector<Entry> segs_;
    double fExp_; // 1/(p-1)
};

/// Cumulative convection integral H(t) = int_0^t h, cached at the union
/// breakpoints.
class CumulativeH {
public:
    explicit CumulativeH(const ProblemSpec& spec);
    double operator()(double t) const;

private:
    const ProblemSpec* spec_;
    std::vector<double> breaks_;
    std::vector<double> cum_;
};

/// A numerically estimated one-sided limit along the dyadic tail
/// t_k = s* -+ 2^-k, k = 8..40.
struct LimitEstimate {
    double value = 0.0;              // +inf encodes divergence
    bool converged = false;          // tail stabilized (spread of last 8 <= 1%)
    std::vector<Witness> tail;       // diagnostics: (t_k, ratio)
};

struct SupEstimate {
    double value = 0.0;              // +inf encodes divergence beyond 1e12
    double argmax = 0.0;
    bool finite = true;
};

struct DerivedQuantities {
    double p = 2, pPrime = 2, sStar = 0.5;
    double kappa = 2.0;              // (p')^{1/p'} p^{1/p}
    double hm = 0, hM = 0, hAtSStar = 0;
    double hInfGlobal = 0, hSupGlobal = 0; // over all of [0,1]
    double HsStar = 0, H1 = 0;
    double fIntegral = 0;
    bool fIntegralConverged = false;
    SupEstimate muTilde, muHat;
    LimitEstimate nuTilde, nuHat;
};

struct SpeedBrackets {
    // enforcement brackets (existence-theorem form)
    double loFPrimary, hiFPrimary;
    double loBPrimary, hiBPrimary;
    // sharpened analytic brackets (liminf-refined); not enforced on bisected
    // values, which are terminal-resolution-limited
    double loF, hiF, loB, hiB;
    // open admissible window for the critical speed
    double cStarLo, cStarHi;
};

ValidationReport validate_problem(const ProblemSpec& spec);

/// mu/nu ratio quantities; grid scan + golden-section refinement for the
/// sups, dyadic-tail minimum for the liminfs.
void sup_ratios(const ProblemSpec& spec, DerivedQuantities& dq);

DerivedQuantities derived_quantities(const ProblemSpec& spec);

SpeedBrackets speed_bounds(const ProblemSpec& spec, const DerivedQuantities& dq);

} // namespace travwave
