#pragma once

#include <string>
#include <vector>

#include "travwave/quantities.hpp"

namespace travwave {

/// Tri-state verdict for one theorem-level hypothesis, with the sample
/// points and limit tails that justify it.
struct ConditionReport {
    std::string condition;
    Verdict verdict = Verdict::Inconclusive;
    std::string detail;
    double minMargin = 0.0; // smallest normalized strict-inequality gap seen
    std::vector<Witness> witnesses;
    std::vector<Witness> limitDiagnostics;
};

/// Ratio-tail existence conditions: the convection increment against the
/// forcing, one-sided at s*. Satisfied when either tail is suitably bounded.
ConditionReport check_existence_ratio_tails(const ProblemSpec& spec);

/// Integral-sign existence condition: the cumulative convection increment
/// becomes nonpositive somewhere.
ConditionReport check_existence_integral_sign(const ProblemSpec& spec);

/// Barrier nonexistence condition: strict positivity of the cumulative
/// increment plus the two pointwise forcing bounds; the barrier derivative
/// inequality is evaluated as a redundant cross-check.
ConditionReport check_nonexistence_barrier(const ProblemSpec& spec);

/// Necessary bounds any claimed wave speed (and the two sub-interval
/// thresholds) must satisfy.
ConditionReport check_necessary_speed(const ProblemSpec& spec, double c);

/// Nonvanishing of the profile derivative where it crosses s*: automatic for
/// p <= 2, exponent-fit test for p > 2.
ConditionReport check_derivative_nonvanishing(const ProblemSpec& spec);

/// The four speed-independent checks in report order.
std::vector<ConditionReport> check_all(const ProblemSpec& spec);

} // namespace travwave
