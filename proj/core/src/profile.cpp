#include "travwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "travwave/quadrature.hpp"

namespace travwave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double CriticalTrajectories::yAt(const ProblemSpec& spec, double t) const {
    if (t <= spec.sStar) {
        if (t >= forward->coveredFrom() && t <= forward->coveredTo()) return forward->eval(t);
        return backward->eval(t);
    }
    if (t >= backward->coveredFrom() && t <= backward->coveredTo()) return backward->eval(t);
    return forward->eval(t);
}

CriticalTrajectories critical_trajectories(const ProblemSpec& spec, double c,
                                           const IntegratorOptions& opts, double matchTol) {
    // keep the leading-order bootstrap patch below the profile truncation so
    // no profile quadrature node ever reads a leading-order-only value
    IntegratorOptions o = opts;
    o.bootstrapWidth = std::min(o.bootstrapWidth, 5e-7);
    Classification cls = classify_speed(spec, c, o, matchTol);
    if (cls.kind != SpeedClass::CriticalCandidate)
        throw NumericError("trajectories at c = " + std::to_string(c) +
                           " are not critical (classified " + to_string(cls.kind) + ")");
    CriticalTrajectories out;
    out.c = c;
    out.matchTol = matchTol;
    out.forward = cls.forward;
    out.backward = cls.backward;
    return out;
}

namespace {

// integrand of z(U): d(u)^{1/(p-1)} / y(u)^{1/p}, positive for 0 < u < 1
struct ProfileIntegrand {
    const ProblemSpec& spec;
    const CriticalTrajectories& traj;
    double fExp, invP;

    ProfileIntegrand(const ProblemSpec& s, const CriticalTrajectories& tr)
        : spec(s), traj(tr), fExp(1.0 / (s.p - 1.0)), invP(1.0 / s.p) {}

    double operator()(double u) const {
        double dv = spec.d.eval(u, Side::Right);
        double y = traj.yAt(spec, u);
        if (!(y > 0.0)) throw NumericError("trajectory not positive at U = " + std::to_string(u));
        double w = (fExp == 1.0) ? dv : std::pow(dv, fExp);
        return w / std::pow(y, invP);
    }
};

double uPrimeOneSided(const ProblemSpec& spec, double u, double y, Side side) {
    double dv = spec.d.eval(u, side);
    if (!(dv > 0.0)) return -kInf;
    double zpow = std::pow(y, 1.0 / spec.pPrime);
    return -std::pow(zpow / dv, 1.0 / (spec.p - 1.0));
}

FrontInfo classifyOneFront(const ProblemSpec& spec, const CriticalTrajectories& traj,
                           bool uToZero) {
    // uToZero: the U -> 0 end (t -> 0; forward trajectory side, z -> z1);
    // otherwise the U -> 1 end (backward side, z -> z0).
    FrontInfo info;
    ProfileIntegrand I(spec, traj);
    const Trajectory& side = uToZero ? *traj.forward : *traj.backward;
    double bootLimit = std::max(4.0 * side.bootstrapWidth(), 1e-8);

    int kMin = 6;
    int kMax = 24;
    while (std::ldexp(1.0, -kMax) < bootLimit && kMax > kMin + 4) --kMax;

    auto offToU = [&](double off) { return uToZero ? off : 1.0 - off; };

    // dyadic partial sums of the endpoint integral
    std::vector<double> sums;
    for (int k = kMin; k < kMax; ++k) {
        double a = std::ldexp(1.0, -(k + 1)), b = std::ldexp(1.0, -k);
        double ua = offToU(a), ub = offToU(b);
        auto q = integrate([&](double u) { return I(u); }, std::min(ua, ub), std::max(ua, ub),
                           1e-12, 1e-9);
        sums.push_back(q.value);
    }
    // fitted local exponent of y from dyadic samples
    {
        std::vector<double> xs, ys;
        for (int k = kMin; k <= kMax; ++k) {
            double off = std::ldexp(1.0, -k);
            double y = traj.yAt(spec, offToU(off));
            if (y > 0.0) {
                xs.push_back(std::log(off));
                ys.push_back(std::log(y));
            }
        }
        if (xs.size() >= 4) {
            double n = static_cast<double>(xs.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
            }
            info.tailExponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            double icept = (sy - info.tailExponent * sx) / n;
            double maxResid = 0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                maxResid = std::max(maxResid,
                                    std::fabs(ys[i] - (info.tailExponent * xs[i] + icept)));
            info.exponentReliable = maxResid < 0.1;
        }
    }

    if (sums.size() < 5) {
        info.finite = false;
        info.z = uToZero ? kInf : -kInf;
        return info;
    }
    std::vector<double> ratios;
    for (std::size_t i = sums.size() - 5; i + 1 < sums.size(); ++i)
        if (sums[i] > 0.0) ratios.push_back(sums[i + 1] / sums[i]);
    std::sort(ratios.begin(), ratios.end());
    double median = ratios.empty() ? 1.0 : ratios[ratios.size() / 2];
    info.sumRatio = median;
    info.finite = median < 0.9;
    if (!info.finite) info.z = uToZero ? kInf : -kInf;
    return info;
}

} // namespace

FrontClassification classify_fronts(const ProblemSpec& spec, const CriticalTrajectories& traj) {
    FrontClassification fc;
    fc.right = classifyOneFront(spec, traj, true);
    fc.left = classifyOneFront(spec, traj, false);
    return fc;
}

WaveProfile reconstruct_profile(const ProblemSpec& spec, const CriticalTrajectories& traj,
                                int nSamples) {
    if (nSamples < 16) nSamples = 16;
    const double uMin = 1e-6, uMax = 1.0 - 1e-6;

    bool fwdInterior = traj.forward->exit() && traj.forward->exit()->kind == ExitKind::HitZero &&
                       traj.forward->exit()->t < 1.0 - 1e-6;
    bool bwdInterior = traj.backward->exit() && traj.backward->exit()->kind == ExitKind::HitZero &&
                       traj.backward->exit()->t > 1e-6;
    if (fwdInterior || bwdInterior || traj.forward->terminalValue() > 10.0 * traj.matchTol ||
        traj.backward->terminalValue() > 10.0 * traj.matchTol)
        throw NumericError("trajectory pair is not critical: terminal values exceed matchTol");

    WaveProfile wp;
    wp.c = traj.c;
    wp.truncationU = uMin;

    // sample grid in U: uniform core + geometric clusters toward both
    // equilibria + every union breakpoint (exact quadrature split points)
    std::vector<double> grid;
    grid.push_back(0.5);
    for (int i = 0; i <= nSamples; ++i) grid.push_back(uMin + (uMax - uMin) * i / nSamples);
    for (double u = uMin; u < 0.05; u *= 1.5) grid.push_back(u);
    for (double u = 1.0 - uMax; u < 0.05; u *= 1.5) grid.push_back(1.0 - u);
    for (double b : spec.breakUnion)
        if (b > uMin && b < uMax) grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    ProfileIntegrand I(spec, traj);

    // z accumulated outward from the anchor U = 1/2
    std::size_t n = grid.size();
    std::vector<double> zs(n, 0.0);
    std::size_t anchor = std::find(grid.begin(), grid.end(), 0.5) - grid.begin();
    for (std::size_t i = anchor; i-- > 0;) {
        auto q = integrate([&](double u) { return I(u); }, grid[i], grid[i + 1], 1e-12, 1e-9);
        zs[i] = zs[i + 1] + q.value; // U below 1/2 lies at positive z
    }
    for (std::size_t i = anchor + 1; i < n; ++i) {
        auto q = integrate([&](double u) { return I(u); }, grid[i - 1], grid[i], 1e-12, 1e-9);
        zs[i] = zs[i - 1] - q.value;
    }

    // samples ordered by increasing z = decreasing U
    for (std::size_t i = n; i-- > 0;) {
        double u = grid[i];
        double y = traj.yAt(spec, u);
        wp.z.push_back(zs[i]);
        wp.U.push_back(u);
        wp.yAtU.push_back(y);
        wp.UprimeLeft.push_back(uPrimeOneSided(spec, u, y, u > 0.0 ? Side::Left : Side::Right));
        wp.UprimeRight.push_back(uPrimeOneSided(spec, u, y, u < 1.0 ? Side::Right : Side::Left));
    }

    // zetas: z-locations of the interior diffusion breakpoints
    const auto& dbk = spec.d.breakpoints();
    for (std::size_t k = 1; k + 1 < dbk.size(); ++k) {
        auto it = std::lower_bound(grid.begin(), grid.end(), dbk[k]);
        if (it != grid.end() && *it == dbk[k])
            wp.zetas.push_back(zs[static_cast<std::size_t>(it - grid.begin())]);
    }
    std::sort(wp.zetas.begin(), wp.zetas.end());

    auto fronts = classify_fronts(spec, traj);
    wp.leftFront = fronts.left;
    wp.rightFront = fronts.right;

    // finite fronts: extend the truncated coordinate by the convergent tail
    if (fronts.right.finite) {
        double zAtUMin = zs[0];
        double tail = 0.0;
        double r = fronts.right.sumRatio;
        auto q = integrate([&](double u) { return I(u); }, uMin * 0.5, uMin, 1e-12, 1e-9);
        tail = q.value / std::max(1e-12, 1.0 - r); // geometric estimate of the rest
        wp.z1 = zAtUMin + q.value + tail * r;
        wp.rightFront.z = wp.z1;
    } else {
        wp.z1 = kInf;
    }
    if (fronts.left.finite) {
        double zAtUMax = zs[n - 1];
        auto q = integrate([&](double u) { return I(u); }, uMax, 1.0 - 0.5e-6, 1e-12, 1e-9);
        double r = fronts.left.sumRatio;
        double tail = q.value / std::max(1e-12, 1.0 - r);
        wp.z0 = zAtUMax - q.value - tail * r;
        wp.leftFront.z = wp.z0;
    } else {
        wp.z0 = -kInf;
    }
    return wp;
}

ResidualStats profile_residual(const ProblemSpec& spec, const WaveProfile& profile,
                               const CriticalTrajectories& traj, double c, int nPairs) {
    ResidualStats st;
    const std::size_t n = profile.z.size();
    if (n < 4) throw NumericError("profile has too few samples for the residual mesh");

    CumulativeH H(spec);
    ProfileIntegrand I(spec, traj);

    auto vOf = [&](std::size_t i) {
        return -std::pow(profile.yAtU[i], 1.0 / spec.pPrime);
    };

    // deterministic mesh of index pairs: strides spanning the breakpoints
    for (int k = 0; k < nPairs; ++k) {
        std::size_t i = (static_cast<std::size_t>(k) * 37u) % n;
        std::size_t j = (i + 1 + (static_cast<std::size_t>(k) * 53u + n / 3u) % (n - 1)) % n;
        if (i == j) continue;
        if (i > j) std::swap(i, j);

        double Ui = profile.U[i], Uj = profile.U[j];
        // integral of g(U(tau)) dtau transformed to the U variable
        auto q = integrate_split(
            [&](double u) { return spec.g.eval(u, Side::Right) * I(u); }, Uj, Ui,
            spec.breakUnion, 1e-11, 1e-9);
        double resid = vOf(j) - vOf(i) + c * (Uj - Ui) - (H(Uj) - H(Ui)) + q.value;
        st.maxAbs = std::max(st.maxAbs, std::fabs(resid));
        ++st.pairs;
    }

    // flux continuity across each diffusion jump
    const auto& dbk = spec.d.breakpoints();
    for (std::size_t k = 1; k + 1 < dbk.size(); ++k) {
        double m = dbk[k];
        if (m <= profile.truncationU || m >= 1.0 - profile.truncationU) continue;
        double y = traj.yAt(spec, m);
        double upL = uPrimeOneSided(spec, m, y, Side::Left);
        double upR = uPrimeOneSided(spec, m, y, Side::Right);
        double dL = spec.d.eval(m, Side::Left), dR = spec.d.eval(m, Side::Right);
        double fluxL = dL * std::pow(std::fabs(upL), spec.p - 2.0) * upL;
        double fluxR = dR * std::pow(std::fabs(upR), spec.p - 2.0) * upR;
        st.fluxMismatch.push_back(std::fabs(fluxL - fluxR));
        st.uPrimeJump.push_back(std::fabs(upL - upR));
    }
    return st;
}

void write_profile_csv(const std::string& path, const WaveProfile& profile) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "z,U,Uprime_left,Uprime_right\n";
    char buf[200];
    for (std::size_t i = 0; i < profile.z.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e\n", profile.z[i], profile.U[i],
                      profile.UprimeLeft[i], profile.UprimeRight[i]);
        out << buf;
    }
}

} // namespace travwave
