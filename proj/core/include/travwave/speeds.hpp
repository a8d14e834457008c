#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "travwave/shooting.hpp"

namespace travwave {

struct SpeedOptions {
    IntegratorOptions integ{};
    double matchTol = 1e-7;
    int iterationBudget = 200;
    /// Descending terminal thresholds for the sub-interval threshold
    /// bisections. Near the true threshold the terminal value at s* decays
    /// faster than any fixed tolerance resolves, so the bisection is repeated
    /// with a deepening cutoff until the located speed stops moving.
    std::vector<double> terminalLadder = {1e-7, 1e-10, 1e-13, 1e-16, 1e-19, 1e-22, 1e-25};
};

enum class ThresholdKind { FrontCF, BackCB };

struct ThresholdResult {
    ThresholdKind which = ThresholdKind::FrontCF;
    double value = 0.0;              // extended real
    double terminalValueAtSStar = 0.0;
    bool converged = false;          // ladder values stabilized within tol
    bool saturatedAtEndpoint = false;// predicate held across the whole bracket
    std::array<double, 2> primaryBracket{0, 0};
    std::vector<std::array<double, 2>> bracketHistory; // deepest rung
    std::vector<std::array<double, 2>> rungValues;     // (terminal cutoff, c)
};

ThresholdResult threshold_cF(const ProblemSpec& spec, double tol, const SpeedOptions& opt = {});
ThresholdResult threshold_cB(const ProblemSpec& spec, double tol, const SpeedOptions& opt = {});

enum class WaveVerdict { UniqueWaveExists, NoWaveAnyC, Inconclusive };
const char* to_string(WaveVerdict v);

struct SpeedProbe {
    double c;
    SpeedClass kind;
};

struct SpeedReport {
    double cF = 0.0, cB = 0.0;       // operational thresholds (extended reals)
    bool cFConverged = false, cBConverged = false;
    std::optional<double> cStar;
    WaveVerdict verdict = WaveVerdict::Inconclusive;
    int iterations = 0;
    std::vector<SpeedProbe> evidence;
    std::vector<std::string> warnings;
    SpeedBrackets brackets{};
    DerivedQuantities derived{};
    ThresholdResult front{}, back{};
};

/// Locates the unique admissible wave speed by monotone bisection on the
/// shooting classification, or decides that no speed admits a wave.
SpeedReport critical_speed(const ProblemSpec& spec, double tol, const SpeedOptions& opt = {});

} // namespace travwave
