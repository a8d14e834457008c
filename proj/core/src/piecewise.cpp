#include "travwave/piecewise.hpp"

#include <algorithm>
#include <cmath>

namespace travwave {

PiecewiseFunction PiecewiseFunction::fromStrings(std::vector<double> breakpoints,
                                                 const std::vector<std::string>& segmentSources,
                                                 std::vector<std::optional<double>> declaredValues,
                                                 PointValueRule rule) {
    std::vector<Expression> segs;
    segs.reserve(segmentSources.size());
    for (const auto& s : segmentSources) segs.push_back(Expression::parse(s));
    return PiecewiseFunction(std::move(breakpoints), std::move(segs), std::move(declaredValues), rule);
}

PiecewiseFunction::PiecewiseFunction(std::vector<double> breakpoints,
                                     std::vector<Expression> segments,
                                     std::vector<std::optional<double>> declaredValues,
                                     PointValueRule rule)
    : breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
    if (breakpoints_.size() < 2)
        throw ConfigError("piecewise function needs at least breakpoints 0 and 1");
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw ConfigError("breakpoints must start at 0 and end at 1");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw ConfigError("breakpoints must be strictly increasing");
    if (segments_.size() != breakpoints_.size() - 1)
        throw ConfigError("segment count must equal breakpoint count - 1");
    if (!declaredValues.empty() && declaredValues.size() != breakpoints_.size())
        throw ConfigError("declared values list must match breakpoint count");

    pointValues_.resize(breakpoints_.size());
    declared_.assign(breakpoints_.size(), false);
    hasValue_.assign(breakpoints_.size(), true);
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        if (k < declaredValues.size() && declaredValues[k].has_value()) {
            pointValues_[k] = *declaredValues[k];
            declared_[k] = true;
            continue;
        }
        // Default rule. One-sided values come from evaluating the adjacent
        // segment expression at the breakpoint itself; a coefficient singular
        // at an endpoint simply has no point value there.
        const bool hasLeft = k > 0;
        const bool hasRight = k < segments_.size();
        try {
            double left = hasLeft ? segments_[k - 1].eval(breakpoints_[k]) : 0.0;
            double right = hasRight ? segments_[k].eval(breakpoints_[k]) : 0.0;
            if (!hasLeft) pointValues_[k] = right;
            else if (!hasRight) pointValues_[k] = left;
            else if (rule == PointValueRule::MinOfSides) pointValues_[k] = std::min(left, right);
            else pointValues_[k] = right;
        } catch (const EvalDomainError&) {
            hasValue_[k] = false;
            pointValues_[k] = 0.0;
        }
    }
}

std::size_t PiecewiseFunction::segmentIndex(double t, Side side) const {
    if (t < breakpoints_.front() || t > breakpoints_.back())
        throw EvalDomainError("piecewise evaluation outside [0,1]", t);
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t seg = static_cast<std::size_t>(it - breakpoints_.begin());
    seg = (seg == 0) ? 0 : seg - 1;                       // segment with breakpoints_[seg] <= t
    if (seg >= segments_.size()) seg = segments_.size() - 1; // t == 1
    if (side == Side::Left && t == breakpoints_[seg] && seg > 0) --seg;
    return seg;
}

std::size_t PiecewiseFunction::breakpointIndexOf(double t) const {
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it != breakpoints_.end() && *it == t)
        return static_cast<std::size_t>(it - breakpoints_.begin());
    return npos;
}

double PiecewiseFunction::eval(double t, Side side) const {
    if (t < 0.0 || t > 1.0)
        throw EvalDomainError("piecewise evaluation outside [0,1]", t);
    if (side == Side::Left && t == 0.0)
        throw EvalDomainError("left-sided value at t=0 does not exist", t);
    if (side == Side::Right && t == 1.0)
        throw EvalDomainError("right-sided value at t=1 does not exist", t);

    std::size_t bk = breakpointIndexOf(t);
    if (bk != npos) {
        if (side == Side::Point) {
            if (!hasValue_[bk])
                throw EvalDomainError("no declared or finite value at breakpoint", t);
            return pointValues_[bk];
        }
        std::size_t seg = (side == Side::Left) ? bk - 1 : bk;
        return segments_[seg].eval(t);
    }
    return segments_[segmentIndex(t, side)].eval(t);
}

double PiecewiseFunction::oneSidedLimit(std::size_t bk, Side side, bool* stable) const {
    if (bk >= breakpoints_.size())
        throw EvalDomainError("breakpoint index out of range", 0.0);
    const double b = breakpoints_[bk];
    const double sign = (side == Side::Left) ? -1.0 : 1.0;
    if ((side == Side::Left && bk == 0) || (side == Side::Right && bk + 1 == breakpoints_.size()))
        throw EvalDomainError("one-sided limit outside domain", b);

    std::size_t seg = (side == Side::Left) ? bk - 1 : bk;
    const double offsets[3] = {1e-4, 1e-6, 1e-8};
    double v[3];
    for (int i = 0; i < 3; ++i) v[i] = segments_[seg].eval(b + sign * offsets[i]);

    double d1 = v[1] - v[0];
    double d2 = v[2] - v[1];
    double limit = v[2];
    double denom = d2 - d1;
    if (std::fabs(denom) > 1e-300) {
        double aitken = v[2] - d2 * d2 / denom;
        if (std::isfinite(aitken)) limit = aitken;
    }
    if (stable) {
        double scale = std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2]), 1.0});
        *stable = std::fabs(d2) <= std::fabs(d1) + 1e-9 * scale && std::isfinite(limit);
    }
    return limit;
}

} // namespace travwave
