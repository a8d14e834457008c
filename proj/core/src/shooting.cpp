#include "travwave/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace travwave {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
// b5 - b4
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
// dense-output weights
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;
} // namespace

void IntegratorOptions::validate() const {
    if (!(relTol > 0) || !(absTol > 0) || !(maxStep > 0) || !(bootstrapWidth > 0) ||
        !(zeroThreshold > 0))
        throw ConfigError("integrator options must all be positive");
    if (zeroThreshold < 10.0 * absTol)
        throw ConfigError("zeroThreshold must be at least 10 * absTol");
}

IntegratorOptions IntegratorOptions::withFloor(double floor) const {
    IntegratorOptions o = *this;
    o.absTol = floor;
    o.zeroThreshold = std::max(o.zeroThreshold, 10.0 * floor);
    return o;
}

const char* to_string(SpeedClass k) {
    switch (k) {
    case SpeedClass::A0: return "A0";
    case SpeedClass::A1: return "A1";
    case SpeedClass::CriticalCandidate: return "criticalCandidate";
    default: return "degenerateAtSStar";
    }
}

double Trajectory::Piece::evalAt(double tau) const {
    switch (kind) {
    case Zero:
        return 0.0;
    case Hermite: {
        double th = (tau - t0) / h;
        double th1 = 1.0 - th;
        // cubic Hermite: values a0,a1; slopes a2,a3
        return th1 * th1 * (a0 * (1.0 + 2.0 * th) + a2 * h * th) +
               th * th * (a1 * (3.0 - 2.0 * th) - a3 * h * th1);
    }
    case Dense:
    default: {
        double th = (tau - t0) / h;
        double th1 = 1.0 - th;
        return a0 + th * (a1 + th1 * (a2 + th * (a3 + th1 * a4)));
    }
    }
}

double Trajectory::eval(double t) const {
    double tau = toTau(t);
    if (pieces_.empty()) throw Error("empty trajectory");
    double lo = pieces_.front().lo, hi = pieces_.back().hi;
    if (tau < lo - 1e-12 || tau > hi + 1e-12)
        throw Error("trajectory evaluated outside covered domain");
    tau = std::clamp(tau, lo, hi);
    std::size_t a = 0, b = pieces_.size() - 1;
    while (a < b) {
        std::size_t m = (a + b) / 2;
        if (pieces_[m].hi < tau) a = m + 1;
        else b = m;
    }
    return pieces_[a].evalAt(tau);
}

std::vector<std::pair<double, double>> Trajectory::nodes() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(tauNodes_.size());
    for (const auto& [tau, y] : tauNodes_) out.push_back({fromTau(tau), y});
    if (mirrored_) std::reverse(out.begin(), out.end());
    return out;
}

double Trajectory::coveredFrom() const {
    return mirrored_ ? 1.0 - coveredTau_ : 0.0;
}

double Trajectory::coveredTo() const {
    return mirrored_ ? 1.0 : coveredTau_;
}

std::pair<double, double> Trajectory::positivityInterval() const {
    if (direction_ == Direction::Forward)
        return {0.0, exit_ ? exit_->t : coveredTo()};
    return {exit_ ? exit_->t : coveredFrom(), 1.0};
}

// ---------------------------------------------------------------------------
// IVP solver. Everything below runs in the integration coordinate tau, with
// the backward problem mirrored (tau = 1-t, h -> -h, f -> -f, c -> -c) so
// both directions share one code path.
// ---------------------------------------------------------------------------

class IvpSolver {
public:
    IvpSolver(const ProblemSpec& spec, double c, Direction dir, IntegratorOptions opts,
              double tauStop)
        : spec_(spec), tab_(spec), opts_(opts), dir_(dir),
          mirrored_(dir == Direction::Backward), tauStop_(std::min(tauStop, 1.0)) {
        opts_.validate();
        p_ = spec.p;
        pp_ = spec.pPrime;
        invP_ = 1.0 / spec.p;
        ceff_ = mirrored_ ? -c : c;
        origC_ = c;

        const auto& bu = spec.breakUnion;
        if (mirrored_) {
            for (std::size_t i = bu.size(); i-- > 0;) breaks_.push_back(1.0 - bu[i]);
        } else {
            breaks_ = bu;
        }
        breaks_.front() = 0.0;
        breaks_.back() = 1.0;
    }

    Trajectory run();

private:
    std::size_t origSeg(std::size_t iseg) const {
        return mirrored_ ? (breaks_.size() - 2 - iseg) : iseg;
    }
    double fAt(double tau, std::size_t iseg) const {
        double t = mirrored_ ? 1.0 - tau : tau;
        double v = tab_.f(t, origSeg(iseg));
        return mirrored_ ? -v : v;
    }
    double hAt(double tau, std::size_t iseg) const {
        double t = mirrored_ ? 1.0 - tau : tau;
        double v = tab_.h(t, origSeg(iseg));
        return mirrored_ ? -v : v;
    }
    double rhs(double tau, double y, std::size_t iseg) const {
        double yp = y > 0.0 ? y : 0.0;
        double ypow = (p_ == 2.0) ? std::sqrt(yp) : std::pow(yp, invP_);
        return pp_ * ((ceff_ - hAt(tau, iseg)) * ypow - fAt(tau, iseg));
    }

    enum class EventOutcome { None, Touched, Terminated };

    double findStart(std::size_t& isegOut) const;
    double bootIntegral(double from, double to, std::size_t iseg) const;
    void emitBootstrap(Trajectory& tr, double tStart, double w, std::size_t iseg) const;
    bool stepSegment(Trajectory& tr, double A, double B, std::size_t iseg, double& tau,
                     double& y, double& hSug);
    void finishByQuadrature(Trajectory& tr, double A, double B, std::size_t iseg, double& tau,
                            double& y);
    EventOutcome handleEventOnPiece(Trajectory& tr, const Trajectory::Piece& pc, double y0,
                                    std::size_t iseg, double& tau, double& y);
    void pushPiece(Trajectory& tr, const Trajectory::Piece& pc, double yEnd) {
        tr.pieces_.push_back(pc);
        tr.tauNodes_.push_back({pc.hi, yEnd});
    }

    std::string where(double tau) const {
        return "direction=" + std::string(mirrored_ ? "backward" : "forward") +
               " c=" + std::to_string(origC_) + " t=" + std::to_string(mirrored_ ? 1 - tau : tau);
    }

    const ProblemSpec& spec_;
    CoefficientTable tab_;
    IntegratorOptions opts_;
    Direction dir_;
    bool mirrored_;
    double tauStop_;
    double p_, pp_, invP_, ceff_, origC_;
    std::vector<double> breaks_;
};

// first tau where the forcing stops vanishing identically
double IvpSolver::findStart(std::size_t& isegOut) const {
    const double tiny = 1e-30;
    for (std::size_t s = 0; s + 1 < breaks_.size(); ++s) {
        double a = breaks_[s], b = std::min(breaks_[s + 1], tauStop_);
        if (!(a < b)) break;
        const int n = 512;
        double prev = a;
        for (int i = 1; i <= n; ++i) {
            double tau = a + (b - a) * i / n;
            double v;
            try {
                v = std::fabs(fAt(tau, s));
            } catch (const EvalDomainError&) {
                v = kInf; // singular forcing certainly does not vanish
            }
            if (v > tiny) {
                double lo = prev, hi = tau;
                for (int it = 0; it < 60 && hi - lo > 1e-16; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double vm;
                    try {
                        vm = std::fabs(fAt(mid, s));
                    } catch (const EvalDomainError&) {
                        vm = kInf;
                    }
                    (vm > tiny ? hi : lo) = mid;
                }
                isegOut = s;
                return lo;
            }
            prev = tau;
        }
    }
    isegOut = breaks_.size() - 2;
    return tauStop_;
}

double IvpSolver::bootIntegral(double from, double to, std::size_t iseg) const {
    bool leftSing = (from == 0.0);
    auto q = integrate_singular([&](double tau) { return fAt(tau, iseg); }, from, to,
                                leftSing, false, 1e-15, 1e-12);
    return -pp_ * q.value;
}

void IvpSolver::emitBootstrap(Trajectory& tr, double tStart, double w, std::size_t iseg) const {
    // geometric subdivision toward tStart; Hermite pieces carry the
    // leading-order values y = -p' int f with slopes -p' f
    std::vector<double> ts;
    ts.push_back(tStart);
    for (int j = 6; j >= 0; --j) ts.push_back(tStart + w * std::pow(0.25, j));
    double yPrev = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        double a = ts[i], b = ts[i + 1];
        double yNext = yPrev + bootIntegral(a, b, iseg);
        if (yNext < 0.0) yNext = 0.0;
        Trajectory::Piece pc;
        pc.lo = pc.t0 = a;
        pc.hi = b;
        pc.h = b - a;
        pc.kind = Trajectory::Piece::Hermite;
        pc.a0 = yPrev;
        pc.a1 = yNext;
        double da, db;
        try {
            da = -pp_ * fAt(std::max(a, tStart + 1e-3 * (b - a)), iseg);
        } catch (const EvalDomainError&) {
            da = (yNext - yPrev) / (b - a);
        }
        try {
            db = -pp_ * fAt(b, iseg);
        } catch (const EvalDomainError&) {
            db = (yNext - yPrev) / (b - a);
        }
        pc.a2 = da;
        pc.a3 = db;
        tr.pieces_.push_back(pc);
        tr.tauNodes_.push_back({b, yNext});
        yPrev = yNext;
    }
}

// handles a nonpositive excursion of the dense interpolant inside one step
IvpSolver::EventOutcome IvpSolver::handleEventOnPiece(Trajectory& tr,
                                                      const Trajectory::Piece& pc, double y0,
                                                      std::size_t iseg, double& tau, double& y) {
    const double noise = 0.5 * opts_.absTol;
    double thLo = 0.0, thHit = -1.0;
    const int scan = 64;
    for (int j = 1; j <= scan; ++j) {
        double th = static_cast<double>(j) / scan;
        double v = pc.evalAt(pc.t0 + th * pc.h);
        bool crossed = (y0 > 0.0) ? (v <= 0.0) : (v < -noise);
        if (crossed) { thHit = th; break; }
        thLo = th;
    }
    if (thHit < 0.0) return EventOutcome::None;

    double lo = thLo, hi = thHit;
    for (int it = 0; it < 64 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        double v = pc.evalAt(pc.t0 + mid * pc.h);
        bool crossed = (y0 > 0.0) ? (v <= 0.0) : (v < -noise);
        (crossed ? hi : lo) = mid;
    }
    double tauE = std::min(pc.t0 + hi * pc.h, pc.hi);

    Trajectory::Piece cut = pc;
    cut.hi = tauE;
    pushPiece(tr, cut, 0.0);
    tau = tauE;
    y = 0.0;

    double slope = rhs(tauE, 0.0, iseg);
    if (slope < 0.0) {
        tr.exit_ = {mirrored_ ? 1.0 - tauE : tauE, ExitKind::HitZero};
        tr.coveredTau_ = tauE;
        tr.terminalValue_ = 0.0;
        return EventOutcome::Terminated;
    }
    return EventOutcome::Touched;
}

void IvpSolver::finishByQuadrature(Trajectory& tr, double /*A*/, double B, std::size_t iseg,
                                   double& tau, double& y) {
    bool rightSing = (B == 1.0);
    auto q = integrate_singular([&](double x) { return fAt(x, iseg); }, tau, B, false,
                                rightSing, 1e-15, 1e-12);
    double drift = 0.0;
    if (y > 0.0) {
        double hMid = hAt(0.5 * (tau + B), iseg);
        drift = pp_ * (ceff_ - hMid) * std::pow(y, invP_) * (B - tau);
    }
    double yB = y - pp_ * q.value + drift;

    Trajectory::Piece pc;
    pc.kind = Trajectory::Piece::Hermite;
    pc.lo = pc.t0 = tau;
    pc.hi = B;
    pc.h = B - tau;
    pc.a0 = y;
    pc.a1 = std::max(yB, 0.0);
    pc.a2 = (pc.a1 - pc.a0) / pc.h;
    pc.a3 = pc.a2;

    if (yB < 0.0) {
        // locate the crossing on the linear model and stop there
        double frac = pc.a0 / (pc.a0 - yB);
        double tauE = tau + frac * (B - tau);
        pc.hi = std::max(tauE, tau);
        pc.a1 = 0.0;
        pushPiece(tr, pc, 0.0);
        tr.exit_ = {mirrored_ ? 1.0 - pc.hi : pc.hi, ExitKind::HitZero};
        tr.coveredTau_ = pc.hi;
        tr.terminalValue_ = 0.0;
        tau = pc.hi;
        y = 0.0;
        return;
    }
    pushPiece(tr, pc, pc.a1);
    tau = B;
    y = pc.a1;
}

// returns false if the trajectory terminated inside the segment
bool IvpSolver::stepSegment(Trajectory& tr, double A, double B, std::size_t iseg, double& tau,
                            double& y, double& hSug) {
    double h = std::min({hSug, opts_.maxStep, B - A});
    double k1 = rhs(tau, y, iseg);
    int rejects = 0;

    while (tau < B - 1e-15 * std::max(1.0, B)) {
        h = std::min({h, opts_.maxStep, B - tau});
        const double hFloor = std::max(1e-15, 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(tau));
        if (h < hFloor || rejects > 80) {
            if (y <= 10.0 * opts_.absTol) {
                finishByQuadrature(tr, A, B, iseg, tau, y);
                if (tr.exit_) return false;
                hSug = opts_.maxStep;
                return true;
            }
            throw NumericError("step size underflow (" + where(tau) + ")");
        }

        double k2, k3, k4, k5, k6, k7, y1;
        try {
            k2 = rhs(tau + C2 * h, y + h * (A21 * k1), iseg);
            k3 = rhs(tau + C3 * h, y + h * (A31 * k1 + A32 * k2), iseg);
            k4 = rhs(tau + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3), iseg);
            k5 = rhs(tau + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), iseg);
            k6 = rhs(tau + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
                     iseg);
            y1 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
            k7 = rhs(tau + h, y1, iseg);
        } catch (const EvalDomainError&) {
            // singular coefficient at the approaching endpoint: finish the
            // remaining sliver with the integral form
            if (B == 1.0 && B - tau < 1e-4) {
                finishByQuadrature(tr, A, B, iseg, tau, y);
                if (tr.exit_) return false;
                hSug = opts_.maxStep;
                return true;
            }
            h *= 0.25;
            ++rejects;
            continue;
        }

        double errRaw = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        double sc = opts_.absTol + opts_.relTol * std::max(std::fabs(y), std::fabs(y1));
        double err = std::fabs(errRaw) / sc;

        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            ++rejects;
            continue;
        }

        Trajectory::Piece pc;
        pc.kind = Trajectory::Piece::Dense;
        pc.lo = pc.t0 = tau;
        pc.hi = tau + h;
        pc.h = h;
        double dy = y1 - y;
        pc.a0 = y;
        pc.a1 = dy;
        pc.a2 = h * k1 - dy;
        pc.a3 = dy - h * k7 - pc.a2;
        pc.a4 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);

        bool watch = (y1 <= 0.0) || (std::min(y, y1) < opts_.zeroThreshold);
        if (watch) {
            EventOutcome ev = handleEventOnPiece(tr, pc, y, iseg, tau, y);
            if (ev == EventOutcome::Terminated) return false;
            if (ev == EventOutcome::Touched) {
                k1 = rhs(tau, y, iseg);
                rejects = 0;
                hSug = h;
                continue;
            }
        }
        pushPiece(tr, pc, y1);
        tau = pc.hi;
        y = y1;

        k1 = k7;
        rejects = 0;
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
        hSug = h;
    }
    return true;
}

Trajectory IvpSolver::run() {
    Trajectory tr;
    tr.direction_ = dir_;
    tr.mirrored_ = mirrored_;
    tr.c_ = origC_;

    std::size_t isegStart = 0;
    double tStart = findStart(isegStart);
    tr.fVanishes_ = tStart > 1e-12;

    if (tStart > 0.0) {
        Trajectory::Piece z;
        z.kind = Trajectory::Piece::Zero;
        z.lo = z.t0 = 0.0;
        z.hi = tStart;
        z.h = std::max(tStart, 1e-300);
        tr.pieces_.push_back(z);
        tr.tauNodes_.push_back({0.0, 0.0});
        tr.tauNodes_.push_back({tStart, 0.0});
    } else {
        tr.tauNodes_.push_back({0.0, 0.0});
    }

    if (tStart >= tauStop_ - 1e-15) {
        tr.coveredTau_ = tauStop_;
        tr.terminalValue_ = 0.0;
        tr.exit_ = std::nullopt;
        if (tr.pieces_.empty()) {
            Trajectory::Piece z;
            z.kind = Trajectory::Piece::Zero;
            z.lo = z.t0 = 0.0;
            z.hi = tauStop_;
            z.h = std::max(tauStop_, 1e-300);
            tr.pieces_.push_back(z);
        }
        return tr;
    }

    // asymptotic bootstrap with handoff verification: halve the patch until
    // the value carried to the match point stabilizes
    double segEnd = tauStop_;
    for (std::size_t s = 0; s + 1 < breaks_.size(); ++s) {
        if (breaks_[s] <= tStart && tStart < breaks_[s + 1]) {
            isegStart = s;
            segEnd = std::min(breaks_[s + 1], tauStop_);
            break;
        }
    }
    double w0 = std::min(opts_.bootstrapWidth, 0.5 * (segEnd - tStart));
    const double tauMatch = tStart + w0;

    double bootSign = bootIntegral(tStart, tStart + w0, isegStart);
    if (bootSign < 0.0) {
        // forcing pushes down from zero at the start: the clamped solution
        // dies immediately (only reachable for sign-invalid problems)
        tr.exit_ = {mirrored_ ? 1.0 - tStart : tStart, ExitKind::HitZero};
        tr.coveredTau_ = tStart;
        tr.terminalValue_ = 0.0;
        if (tr.pieces_.empty()) {
            Trajectory::Piece z;
            z.kind = Trajectory::Piece::Zero;
            z.lo = z.t0 = 0.0;
            z.hi = std::max(tStart, 1e-300);
            z.h = z.hi;
            tr.pieces_.push_back(z);
        }
        return tr;
    }

    double w = w0;
    double yPrevMatch = kInf;
    double wAccepted = w0;
    for (int round = 0; round < 42; ++round) {
        double yW = std::max(bootIntegral(tStart, tStart + w, isegStart), 0.0);
        // probe integration to the match point (no recording)
        Trajectory scratch;
        scratch.direction_ = dir_;
        scratch.mirrored_ = mirrored_;
        double tauP = tStart + w, yP = yW, hP = w;
        bool alive = true;
        if (tauP < tauMatch) {
            try {
                alive = stepSegment(scratch, tauP, tauMatch, isegStart, tauP, yP, hP);
            } catch (const NumericError&) {
                alive = true; // keep halving; acceptance check below decides
                yP = kInf;
            }
        }
        double yMatch = alive ? yP : 0.0;
        if (std::isfinite(yMatch) &&
            std::fabs(yMatch - yPrevMatch) <=
                0.5 * (opts_.absTol + opts_.relTol * std::fabs(yMatch))) {
            wAccepted = w;
            break;
        }
        yPrevMatch = yMatch;
        wAccepted = w;
        w *= 0.5;
        if (w < 1e-3 * opts_.absTol && w < 1e-13) break;
    }
    tr.bootstrapUsed_ = wAccepted;

    emitBootstrap(tr, tStart, wAccepted, isegStart);
    double tau = tStart + wAccepted;
    double y = tr.tauNodes_.back().second;
    double hSug = wAccepted;

    for (std::size_t s = isegStart; s + 1 < breaks_.size(); ++s) {
        double A = std::max(breaks_[s], tau);
        double B = std::min(breaks_[s + 1], tauStop_);
        if (!(A < B)) {
            if (breaks_[s] >= tauStop_) break;
            continue;
        }
        bool alive = stepSegment(tr, A, B, s, tau, y, hSug);
        if (!alive) return tr;
        if (tau >= tauStop_ - 1e-15) break;
    }

    tr.coveredTau_ = tau;
    tr.terminalValue_ = y;
    tr.exit_ = TrajectoryExit{mirrored_ ? 1.0 - tau : tau, ExitKind::ReachedEnd};
    if (tauStop_ >= 1.0 - 1e-15) {
        // reached the far boundary
        tr.exit_->kind = ExitKind::ReachedEnd;
    }
    return tr;
}

Trajectory solve_forward(const ProblemSpec& spec, double c, const IntegratorOptions& opts) {
    return IvpSolver(spec, c, Direction::Forward, opts, 1.0).run();
}

Trajectory solve_backward(const ProblemSpec& spec, double c, const IntegratorOptions& opts) {
    return IvpSolver(spec, c, Direction::Backward, opts, 1.0).run();
}

Trajectory solve_forward_to(const ProblemSpec& spec, double c, double tStop,
                            const IntegratorOptions& opts) {
    return IvpSolver(spec, c, Direction::Forward, opts, tStop).run();
}

Trajectory solve_backward_to(const ProblemSpec& spec, double c, double tStop,
                             const IntegratorOptions& opts) {
    return IvpSolver(spec, c, Direction::Backward, opts, 1.0 - tStop).run();
}

Classification classify_speed(const ProblemSpec& spec, double c, const IntegratorOptions& opts,
                              double matchTol) {
    IntegratorOptions o = opts;
    for (int attempt = 0;; ++attempt) {
        auto fwd = std::make_shared<Trajectory>(solve_forward(spec, c, o));
        auto bwd = std::make_shared<Trajectory>(solve_backward(spec, c, o));

        Classification out;
        out.c = c;
        out.forward = fwd;
        out.backward = bwd;
        out.forwardExit = fwd->exit();
        out.backwardExit = bwd->exit();
        out.forwardTerminal = fwd->terminalValue();
        out.backwardTerminal = bwd->terminalValue();

        bool fwdInterior = fwd->exit() && fwd->exit()->kind == ExitKind::HitZero &&
                           fwd->exit()->t < 1.0 - kClassifyMargin;
        bool bwdInterior = bwd->exit() && bwd->exit()->kind == ExitKind::HitZero &&
                           bwd->exit()->t > kClassifyMargin;

        const double neck = std::max(1e-6, 10.0 * kClassifyMargin);
        if (fwdInterior && bwdInterior) {
            if (std::fabs(fwd->exit()->t - spec.sStar) <= neck &&
                std::fabs(bwd->exit()->t - spec.sStar) <= neck) {
                out.kind = SpeedClass::DegenerateAtSStar;
                return out;
            }
            if (attempt < 2) {
                o = o.withFloor(o.absTol * 1e-6);
                continue;
            }
            throw AmbiguousClassificationError(
                "forward and backward trajectories both exited the strip in the interior "
                "(c = " + std::to_string(c) + "); tolerances are too loose",
                fwd->exit()->t, bwd->exit()->t);
        }
        if (fwdInterior) { out.kind = SpeedClass::A0; return out; }
        if (bwdInterior) { out.kind = SpeedClass::A1; return out; }

        bool fSmall = out.forwardTerminal <= matchTol;
        bool bSmall = out.backwardTerminal <= matchTol;
        if (fSmall && bSmall) { out.kind = SpeedClass::CriticalCandidate; return out; }
        if (!fSmall && bSmall) { out.kind = SpeedClass::A1; return out; }
        if (fSmall && !bSmall) { out.kind = SpeedClass::A0; return out; }
        if (attempt < 2) {
            o = o.withFloor(o.absTol * 1e-6);
            continue;
        }
        throw AmbiguousClassificationError(
            "both trajectories traversed with terminal values above matchTol "
            "(c = " + std::to_string(c) + ")",
            fwd->terminalValue(), bwd->terminalValue());
    }
}

} // namespace travwave
