#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "travwave/quantities.hpp"

namespace travwave {

enum class Direction { Forward, Backward };
enum class ExitKind { ReachedEnd, HitZero };

struct IntegratorOptions {
    double relTol = 1e-10;
    double absTol = 1e-10;
    double maxStep = 0.01;
    double bootstrapWidth = 1e-3; // initial asymptotic patch length
    double zeroThreshold = 1e-8;  // event watch level, >= 10 * absTol

    void validate() const;
    /// Copy with the absolute floor moved to `floor` (zeroThreshold follows).
    IntegratorOptions withFloor(double floor) const;
};

struct TrajectoryExit {
    double t = 0.0; // original coordinate
    ExitKind kind = ExitKind::ReachedEnd;
};

/// A Caratheodory solution of the first-order equation with dense output.
/// Forward solutions start at y(0) = 0, backward at y(1) = 0; backward runs
/// are integrated on the mirrored problem and mapped back, so all public
/// accessors speak the original t coordinate.
class Trajectory {
public:
    Direction direction() const { return direction_; }
    double c() const { return c_; }

    /// Dense-output evaluation; t must lie in [coveredFrom(), coveredTo()].
    double eval(double t) const;

    /// (t, y) at every integration node, ascending in t.
    std::vector<std::pair<double, double>> nodes() const;

    double coveredFrom() const;
    double coveredTo() const;

    const std::optional<TrajectoryExit>& exit() const { return exit_; }

    /// y at the far end of coverage (0 when the trajectory hit zero).
    double terminalValue() const { return terminalValue_; }

    /// Forward: (0, exit-or-1); backward: (exit-or-0, 1).
    std::pair<double, double> positivityInterval() const;

    /// The forcing vanished on a set of positive measure adjacent to the
    /// start; the solution was continued as identically zero there.
    bool fVanishesNearStart() const { return fVanishes_; }

    /// Width of the leading asymptotic patch actually used; dense output
    /// inside it is leading-order only.
    double bootstrapWidth() const { return bootstrapUsed_; }

    struct Piece {
        double lo = 0, hi = 0;     // domain in integration coordinate
        double t0 = 0, h = 1;      // interpolation parameterization
        enum Kind { Zero, Hermite, Dense } kind = Zero;
        double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0;
        double evalAt(double tau) const;
    };

private:
    Direction direction_ = Direction::Forward;
    bool mirrored_ = false;
    double c_ = 0.0;
    std::vector<Piece> pieces_;                      // ascending in tau
    std::vector<std::pair<double, double>> tauNodes_; // (tau, y)
    std::optional<TrajectoryExit> exit_;
    double terminalValue_ = 0.0;
    double coveredTau_ = 0.0;
    bool fVanishes_ = false;
    double bootstrapUsed_ = 0.0;

    double toTau(double t) const { return mirrored_ ? 1.0 - t : t; }
    double fromTau(double tau) const { return mirrored_ ? 1.0 - tau : tau; }

    friend class IvpSolver;
};

/// Integrates the initial value problem from y(0)=0 over [0,1] (or up to the
/// first terminal zero of y on the positive-forcing side).
Trajectory solve_forward(const ProblemSpec& spec, double c, const IntegratorOptions& opts = {});

/// Terminal value problem from y(1)=0, integrated leftward.
Trajectory solve_backward(const ProblemSpec& spec, double c, const IntegratorOptions& opts = {});

/// Partial solves used by the threshold bisections: integration stops at
/// tStop (forward: t increasing to tStop; backward: t decreasing to tStop).
Trajectory solve_forward_to(const ProblemSpec& spec, double c, double tStop,
                            const IntegratorOptions& opts = {});
Trajectory solve_backward_to(const ProblemSpec& spec, double c, double tStop,
                             const IntegratorOptions& opts = {});

enum class SpeedClass {
    A0,                // forward trajectory leaves the strip before t=1
    A1,                // backward trajectory leaves the strip before t=0
    CriticalCandidate, // both traverse with terminal values below matchTol
    DegenerateAtSStar, // both die essentially at s*: the no-wave signature
};

const char* to_string(SpeedClass k);

/// Classification margin delta_t on exit times.
inline constexpr double kClassifyMargin = 1e-9;

struct Classification {
    SpeedClass kind = SpeedClass::A0;
    double c = 0.0;
    std::optional<TrajectoryExit> forwardExit, backwardExit;
    double forwardTerminal = 0.0;  // y(1) when the forward run traversed
    double backwardTerminal = 0.0; // y(0) when the backward run traversed
    std::shared_ptr<const Trajectory> forward, backward;
};

Classification classify_speed(const ProblemSpec& spec, double c,
                              const IntegratorOptions& opts = {}, double matchTol = 1e-7);

} // namespace travwave
