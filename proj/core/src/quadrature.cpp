#include "travwave/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace travwave {

namespace {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule, on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Gk15 {
    double integral;
    double error;
};

Gk15 gk15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - half * kXgk[i]);
        fv[14 - i] = f(c + half * kXgk[i]);
    }
    fv[7] = f(c);

    double kronrod = 0.0;
    for (int i = 0; i < 7; ++i) kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
    kronrod += kWgk[7] * fv[7];

    double gauss = kWg[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    Gk15 r;
    r.integral = kronrod * half;
    double diff = std::fabs(kronrod - gauss) * std::fabs(half);
    r.error = std::min(diff, std::pow(200.0 * diff, 1.5)); // QUADPACK-style sharpening
    if (!std::isfinite(r.error)) r.error = diff;
    return r;
}

void adapt(const Integrand& f, double a, double b, double absTol, double relTol,
           int depth, int maxDepth, QuadResult& out) {
    Gk15 r = gk15(f, a, b);
    out.evaluations += 15;
    double tol = std::max(absTol, relTol * std::fabs(r.integral));
    if (r.error <= tol || depth >= maxDepth) {
        out.value += r.integral;
        out.errorEstimate += r.error;
        if (depth >= maxDepth && r.error > tol) out.converged = false;
        return;
    }
    double mid = 0.5 * (a + b);
    adapt(f, a, mid, absTol * 0.5, relTol, depth + 1, maxDepth, out);
    adapt(f, mid, b, absTol * 0.5, relTol, depth + 1, maxDepth, out);
}

} // namespace

QuadResult integrate(const Integrand& f, double a, double b,
                     double absTol, double relTol, int maxDepth) {
    QuadResult out;
    out.converged = true;
    if (a == b) return out;
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    adapt(f, a, b, absTol, relTol, 0, maxDepth, out);
    out.value *= sign;
    return out;
}

QuadResult integrate_singular(const Integrand& f, double a, double b,
                              bool leftSingular, bool rightSingular,
                              double absTol, double relTol) {
    if (a == b) return {0.0, 0.0, true, 0};
    if (a > b) {
        QuadResult r = integrate_singular(f, b, a, rightSingular, leftSingular, absTol, relTol);
        r.value = -r.value;
        return r;
    }
    const double mid = 0.5 * (a + b);

    auto combine = [](QuadResult& acc, const QuadResult& r) {
        acc.value += r.value;
        acc.errorEstimate += r.errorEstimate;
        acc.converged = acc.converged && r.converged;
        acc.evaluations += r.evaluations;
    };

    QuadResult out;
    out.converged = true;
    if (leftSingular) {
        auto sub = [&](double s) { return f(a + s * s) * 2.0 * s; };
        combine(out, integrate(sub, 0.0, std::sqrt(mid - a), absTol * 0.5, relTol));
    } else {
        combine(out, integrate(f, a, mid, absTol * 0.5, relTol));
    }
    if (rightSingular) {
        auto sub = [&](double s) { return f(b - s * s) * 2.0 * s; };
        combine(out, integrate(sub, 0.0, std::sqrt(b - mid), absTol * 0.5, relTol));
    } else {
        combine(out, integrate(f, mid, b, absTol * 0.5, relTol));
    }
    return out;
}

QuadResult integrate_split(const Integrand& f, double a, double b,
                           const std::vector<double>& splits,
                           double absTol, double relTol) {
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double s : splits)
        if (s > a && s < b) cuts.push_back(s);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    QuadResult out;
    out.converged = true;
    double perPiece = absTol / static_cast<double>(cuts.size());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadResult r = integrate(f, cuts[i], cuts[i + 1], perPiece, relTol);
        out.value += r.value;
        out.errorEstimate += r.errorEstimate;
        out.converged = out.converged && r.converged;
        out.evaluations += r.evaluations;
    }
    out.value *= sign;
    return out;
}

} // namespace travwave
