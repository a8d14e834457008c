#pragma once

#include <string>
#include <vector>

#include "travwave/problem.hpp"

namespace travwave {

struct SpaceTimeField {
    double L = 40.0;
    int nCells = 0;
    double dx = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> u; // snapshots of cell averages
    long steps = 0;

    double x(int i) const { return -L + (i + 0.5) * dx; }
};

struct SimulateOptions {
    int nSnapshots = 64;
    double initWidth = 0.5; // smoothing width of the initial step
};

/// Explicit finite-volume evolution of u_t + h(u) u_x = [d(u)|u_x|^{p-2}u_x]_x + g(u)
/// from a smoothed 1-to-0 step, on [-L, L] with Dirichlet far-field states.
/// Desk-scale validator, not a production scheme: upwind convective flux in
/// H(u), centered degenerate diffusion with harmonic face coefficients,
/// adaptive parabolic+advective CFL.
SpaceTimeField simulate(const ProblemSpec& spec, double L, int nCells, double tMax,
                        double cflSafety, const SimulateOptions& opt = {});

/// Least-squares slope of the level-crossing position over the trailing
/// window of snapshots.
double measure_front_speed(const SpaceTimeField& field, double level = 0.5,
                           double windowFraction = 0.5);

/// One CSV per snapshot (x,u) under `prefix` plus an index file.
void write_snapshots_csv(const std::string& prefix, const SpaceTimeField& field);

} // namespace travwave
