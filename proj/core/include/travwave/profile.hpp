#pragma once

#include <memory>
#include <string>
#include <vector>

#include "travwave/shooting.hpp"

namespace travwave {

/// Matched forward/backward pair at a (near-)critical speed. The forward run
/// is contraction-accurate near t=0, the backward run near t=1; profile
/// evaluation stitches them at s*.
struct CriticalTrajectories {
    double c = 0.0;
    double matchTol = 1e-7;
    std::shared_ptr<const Trajectory> forward, backward;

    double yAt(const ProblemSpec& spec, double t) const;
};

/// Solves both directions at c and verifies the pair is critical (terminal
/// values below matchTol); throws NumericError otherwise.
CriticalTrajectories critical_trajectories(const ProblemSpec& spec, double c,
                                           const IntegratorOptions& opts = {},
                                           double matchTol = 1e-7);

struct FrontInfo {
    bool finite = false;
    double z = 0.0;             // finite front coordinate, or +-inf
    double tailExponent = 0.0;  // fitted local exponent of y at the equilibrium
    bool exponentReliable = false;
    double sumRatio = 0.0;      // stabilized ratio of dyadic partial sums
};

struct WaveProfile {
    double c = 0.0;
    std::vector<double> z, U;           // strictly increasing z, decreasing U
    std::vector<double> UprimeLeft, UprimeRight;
    std::vector<double> yAtU;           // y at each sample
    double z0 = 0.0, z1 = 0.0;          // front endpoints (extended reals)
    std::vector<double> zetas;          // z where U hits an interior diffusion breakpoint
    FrontInfo leftFront, rightFront;    // left: U->1 (z->z0); right: U->0 (z->z1)
    double truncationU = 1e-6;          // exported samples span [truncationU, 1-truncationU]
};

/// Builds z(U) by quadrature of -d^{1/(p-1)}/y^{1/p} anchored at U(0) = 1/2.
WaveProfile reconstruct_profile(const ProblemSpec& spec, const CriticalTrajectories& traj,
                                int nSamples = 512);

struct FrontClassification {
    FrontInfo left, right;
};

/// Convergence/divergence of the two endpoint integrals (dyadic partial sums)
/// plus fitted tail exponents of y.
FrontClassification classify_fronts(const ProblemSpec& spec, const CriticalTrajectories& traj);

struct ResidualStats {
    double maxAbs = 0.0;        // worst integrated-identity residual over the mesh
    int pairs = 0;
    std::vector<double> fluxMismatch; // per zeta: one-sided flux difference
    std::vector<double> uPrimeJump;   // per zeta: |U'(z+) - U'(z-)|
};

/// Integrated-identity residual over a mesh of coordinate pairs spanning the
/// breakpoints, plus the flux-continuity transition checks at each zeta.
ResidualStats profile_residual(const ProblemSpec& spec, const WaveProfile& profile,
                               const CriticalTrajectories& traj, double c, int nPairs = 256);

/// CSV export: z,U,Uprime_left,Uprime_right with a header row.
void write_profile_csv(const std::string& path, const WaveProfile& profile);

} // namespace travwave
