#include "travwave/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "travwave/quantities.hpp"

namespace travwave {

namespace {

// dense lookup tables over u in [0,1]; piecewise coefficients are sampled
// with right-sided values, which is exact a.e.
class Table {
public:
    Table() = default;
    template <typename F>
    Table(int n, F&& f) : inv_(n - 1.0), vals_(n) {
        for (int i = 0; i < n; ++i) {
            double u = static_cast<double>(i) / (n - 1.0);
            vals_[i] = f(u);
        }
    }
    double operator()(double u) const {
        if (u <= 0.0) return vals_.front();
        if (u >= 1.0) return vals_.back();
        double x = u * inv_;
        int i = static_cast<int>(x);
        double w = x - i;
        return vals_[i] * (1.0 - w) + vals_[i + 1] * w;
    }
    double maxAbsSlopeTimesN() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < vals_.size(); ++i)
            m = std::max(m, std::fabs(vals_[i + 1] - vals_[i]));
        return m * inv_;
    }

private:
    double inv_ = 1.0;
    std::vector<double> vals_;
};

} // namespace

SpaceTimeField simulate(const ProblemSpec& spec, double L, int nCells, double tMax,
                        double cflSafety, const SimulateOptions& opt) {
    if (nCells < 128) throw ConfigError("simulate requires at least 128 cells");
    if (!(cflSafety > 0.0 && cflSafety < 1.0)) throw ConfigError("cflSafety must lie in (0,1)");

    const int M = 16385;
    auto evalRight = [&](const PiecewiseFunction& pf, double u) {
        try {
            return pf.eval(u, u < 1.0 ? Side::Right : Side::Left);
        } catch (const EvalDomainError&) {
            return pf.eval(u == 0.0 ? 1e-12 : u - 1e-12, Side::Right);
        }
    };
    Table dTab(M, [&](double u) { return std::max(0.0, evalRight(spec.d, u)); });
    Table gTab(M, [&](double u) { return evalRight(spec.g, u); });
    Table hTab(M, [&](double u) { return evalRight(spec.h, u); });
    CumulativeH Hfun(spec);
    Table HTab(M, [&](double u) { return Hfun(u); });

    const double gLip = gTab.maxAbsSlopeTimesN(); // ~ max|g'|

    SpaceTimeField field;
    field.L = L;
    field.nCells = nCells;
    field.dx = 2.0 * L / nCells;
    const double dx = field.dx;

    std::vector<double> u(nCells), un(nCells);
    for (int i = 0; i < nCells; ++i)
        u[i] = 1.0 / (1.0 + std::exp(field.x(i) / std::max(opt.initWidth, 2.0 * dx)));

    const int nsnap = std::max(2, opt.nSnapshots);
    double nextSnapAt = 0.0;
    auto snap = [&](double t) {
        field.times.push_back(t);
        field.u.push_back(u);
    };
    snap(0.0);
    nextSnapAt = tMax / (nsnap - 1);

    const double pm2 = spec.p - 2.0;
    const double slopeFloor = 1e-8; // regularizes the singular (p<2) flux derivative
    std::vector<double> Fd(nCells + 1), Fc(nCells + 1);

    double t = 0.0;
    while (t < tMax - 1e-14) {
        double maxDeff = 1e-300, maxA = 1e-300;
        for (int f = 0; f <= nCells; ++f) {
            double uLf = (f == 0) ? 1.0 : u[f - 1];
            double uRf = (f == nCells) ? 0.0 : u[f];
            double s = (uRf - uLf) / dx;
            double dL = dTab(uLf), dR = dTab(uRf);
            double dFace = (dL > 0.0 && dR > 0.0) ? 2.0 * dL * dR / (dL + dR) : 0.0;
            double sa = std::max(std::fabs(s), slopeFloor);
            Fd[f] = dFace * std::pow(sa, pm2) * s;
            maxDeff = std::max(maxDeff, dFace * (spec.p - 1.0) * std::pow(sa, pm2));

            double a;
            if (std::fabs(uRf - uLf) > 1e-14) a = (HTab(uRf) - HTab(uLf)) / (uRf - uLf);
            else a = hTab(0.5 * (uLf + uRf));
            Fc[f] = (a >= 0.0) ? HTab(uLf) : HTab(uRf);
            maxA = std::max(maxA, std::fabs(a));
        }

        double dt = cflSafety * std::min({0.5 * dx * dx / maxDeff, dx / maxA,
                                          0.25 / std::max(gLip, 1e-300)});
        dt = std::min(dt, tMax - t);
        if (!(dt > 0.0)) throw NumericError("time step collapsed in the PDE cross-check");

        for (int i = 0; i < nCells; ++i) {
            double div = (Fd[i + 1] - Fd[i]) / dx - (Fc[i + 1] - Fc[i]) / dx + gTab(u[i]);
            un[i] = u[i] + dt * div;
            if (un[i] < -0.05 || un[i] > 1.05)
                throw NumericError("CFL violation: cell value left [-0.05, 1.05] at x = " +
                                   std::to_string(field.x(i)));
            un[i] = std::clamp(un[i], 0.0, 1.0);
        }
        u.swap(un);
        t += dt;
        ++field.steps;
        if (t >= nextSnapAt - 1e-12 && static_cast<int>(field.times.size()) < nsnap) {
            snap(t);
            nextSnapAt += tMax / (nsnap - 1);
        }
    }
    if (field.times.back() < tMax - 1e-9) snap(t);
    return field;
}

double measure_front_speed(const SpaceTimeField& field, double level, double windowFraction) {
    const double tMax = field.times.back();
    const double tFrom = tMax * (1.0 - std::clamp(windowFraction, 0.01, 1.0));

    std::vector<double> ts, xs;
    for (std::size_t s = 0; s < field.times.size(); ++s) {
        if (field.times[s] < tFrom) continue;
        const auto& u = field.u[s];
        // last cell from the left still above the level
        int idx = -1;
        for (int i = 0; i < field.nCells; ++i)
            if (u[i] >= level) idx = i;
        if (idx < 0 || idx + 1 >= field.nCells) continue;
        double u0 = u[idx], u1 = u[idx + 1];
        double w = (std::fabs(u0 - u1) > 1e-14) ? (u0 - level) / (u0 - u1) : 0.5;
        ts.push_back(field.times[s]);
        xs.push_back(field.x(idx) + w * field.dx);
    }
    if (ts.size() < 4)
        throw NumericError("front-speed fit needs at least 4 usable snapshots in the window");

    double n = static_cast<double>(ts.size());
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sx += xs[i];
        stt += ts[i] * ts[i];
        stx += ts[i] * xs[i];
    }
    return (n * stx - st * sx) / (n * stt - st * st);
}

void write_snapshots_csv(const std::string& prefix, const SpaceTimeField& field) {
    std::ofstream index(prefix + "index.csv");
    if (!index) throw Error("cannot open snapshot index for writing");
    index << "snapshot,time,file\n";
    char buf[128];
    for (std::size_t s = 0; s < field.times.size(); ++s) {
        std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", s);
        std::string name = buf;
        std::ofstream out(prefix + name);
        if (!out) throw Error("cannot open snapshot file for writing");
        out << "x,u\n";
        for (int i = 0; i < field.nCells; ++i) {
            std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", field.x(i), field.u[s][i]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%zu,%.12e,", s, field.times[s]);
        index << buf << name << "\n";
    }
}

} // namespace travwave
