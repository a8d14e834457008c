#include "travwave/problem.hpp"

#include <algorithm>
#include <cmath>

namespace travwave {

ProblemSpec ProblemSpec::make(double p, double sStar,
                              PiecewiseFunction d, PiecewiseFunction g, PiecewiseFunction h) {
    if (!(p > 1.0)) throw ConfigError("p must be > 1");
    if (!(sStar > 0.0 && sStar < 1.0)) throw ConfigError("s_star must lie in (0,1)");

    ProblemSpec s;
    s.p = p;
    s.pPrime = p / (p - 1.0);
    s.sStar = sStar;
    s.d = std::move(d);
    s.g = std::move(g);
    s.h = std::move(h);

    std::vector<double> u;
    for (const auto* pf : {&s.d, &s.g, &s.h})
        u.insert(u.end(), pf->breakpoints().begin(), pf->breakpoints().end());
    u.push_back(sStar);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
            u.end());
    s.breakUnion = std::move(u);
    return s;
}

} // namespace travwave
