#pragma once

#include <string>
#include <vector>

#include "travwave/piecewise.hpp"

namespace travwave {

/// The full problem definition: exponent p, interior reaction zero s*, and
/// the coefficients d (diffusion), g (reaction), h (convection). Single
/// source of truth for everything downstream. Immutable after construction.
struct ProblemSpec {
    double p = 2.0;
    double pPrime = 2.0; // p/(p-1)
    double sStar = 0.5;
    PiecewiseFunction d, g, h;

    /// Union of the three coefficients' breakpoints plus sStar; the
    /// integrator and quadratures never straddle any of these.
    std::vector<double> breakUnion;

    static ProblemSpec make(double p, double sStar,
                            PiecewiseFunction d, PiecewiseFunction g, PiecewiseFunction h);
};

} // namespace travwave
