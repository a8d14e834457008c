#pragma once

#include <optional>
#include <string>
#include <vector>

#include "travwave/expression.hpp"

namespace travwave {

enum class Side { Left, Right, Point };

/// How the value AT a breakpoint defaults when the problem file does not
/// declare one. Diffusion coefficients take the min of the one-sided limits
/// (lower semicontinuity); reaction and convection take the right limit
/// (left limit at t = 1).
enum class PointValueRule { MinOfSides, RightLimit };

/// A coefficient on [0,1]: strictly increasing breakpoints (first 0, last 1),
/// one expression per open segment, and an optional explicit value at each
/// breakpoint. Immutable after construction; safe for shared reads.
class PiecewiseFunction {
public:
    PiecewiseFunction() = default;
    PiecewiseFunction(std::vector<double> breakpoints,
                      std::vector<Expression> segments,
                      std::vector<std::optional<double>> declaredValues,
                      PointValueRule rule);

    static PiecewiseFunction fromStrings(std::vector<double> breakpoints,
                                         const std::vector<std::string>& segmentSources,
                                         std::vector<std::optional<double>> declaredValues,
                                         PointValueRule rule);

    /// Value at t with side selection. Side::Point at an interior point of a
    /// segment is the segment value; at a breakpoint it is the declared or
    /// defaulted point value. Side::Left at 0 and Side::Right at 1 are errors.
    double eval(double t, Side side = Side::Point) const;

    /// Segment expression evaluated directly; `seg` must contain t (hot path,
    /// no search, no breakpoint handling).
    double evalInSegment(double t, std::size_t seg) const { return segments_[seg].eval(t); }

    /// Index of the segment whose closure contains t, resolving breakpoint
    /// ties toward `side` (Point resolves right except at t = 1).
    std::size_t segmentIndex(double t, Side side = Side::Point) const;

    /// Sampled one-sided limit at breakpoint `bk` using offsets 1e-4, 1e-6,
    /// 1e-8 with Aitken extrapolation. `stable` is set when the samples
    /// contract toward a finite value.
    double oneSidedLimit(std::size_t bk, Side side, bool* stable = nullptr) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    std::size_t segmentCount() const { return segments_.size(); }
    const Expression& segment(std::size_t i) const { return segments_[i]; }
    double pointValue(std::size_t bk) const { return pointValues_[bk]; }
    bool pointValueDeclared(std::size_t bk) const { return declared_[bk]; }
    bool pointValueKnown(std::size_t bk) const { return hasValue_[bk]; }
    std::size_t breakpointIndexOf(double t) const; // npos when t is not a breakpoint
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<double> breakpoints_;
    std::vector<Expression> segments_;
    std::vector<double> pointValues_;
    std::vector<bool> declared_;
    std::vector<bool> hasValue_;
};

} // namespace travwave
