#pragma once

#include <functional>
#include <vector>

namespace travwave {

struct QuadResult {
    double value = 0.0;
    double errorEstimate = 0.0;
    bool converged = false;
    long evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7,K15) over [a,b]. Evaluation points are strictly
/// interior, so integrands may be singular at the endpoints as long as they
/// are integrable.
QuadResult integrate(const Integrand& f, double a, double b,
                     double absTol = 1e-10, double relTol = 1e-10, int maxDepth = 48);

/// Like integrate(), but substitutes t = a + s^2 / t = b - s^2 at flagged
/// endpoints first, which resolves integrable endpoint singularities of the
/// kind produced by degenerate diffusion.
QuadResult integrate_singular(const Integrand& f, double a, double b,
                              bool leftSingular, bool rightSingular,
                              double absTol = 1e-10, double relTol = 1e-10);

/// Sums integrate() over [a,b] split at the interior points of `splits`.
QuadResult integrate_split(const Integrand& f, double a, double b,
                           const std::vector<double>& splits,
                           double absTol = 1e-10, double relTol = 1e-10);

} // namespace travwave
