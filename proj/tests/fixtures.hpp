#pragma once

#include "peakwidths/core_params.hpp"

namespace fixtures {

using namespace peakwidths;

inline CuspProfile power_cusp(double sigma) {
    CuspProfile c;
    c.sigma = sigma;
    return c;
}

inline WeightSpec weight(double beta, double alphaExp = 0.0) {
    WeightSpec w;
    w.beta = beta;
    w.alphaExp = alphaExp;
    return w;
}

inline ProblemParams problem(double p, double q, int r, int d = 2, WidthKind kind = WidthKind::Kolmogorov) {
    ProblemParams pp;
    pp.p = p;
    pp.q = q;
    pp.r = r;
    pp.d = d;
    pp.kind = kind;
    return pp;
}

// d=2, sigma=2, p=2, q=4, r=2, beta_g=0.75, beta_v=0.5, alpha_g=1.
struct Set1 {
    ProblemParams params = problem(2.0, 4.0, 2);
    WeightSpec g = weight(0.75, 1.0);
    WeightSpec v = weight(0.5);
    CuspProfile cusp = power_cusp(2.0);
};

// p=q=2, r=1, sigma=2, beta_g=1, alpha_g=2: delta/d = 0.5 < alpha = 2.
struct SmoothnessLimited {
    ProblemParams params = problem(2.0, 2.0, 1);
    WeightSpec g = weight(1.0, 2.0);
    WeightSpec v = weight(0.0);
    CuspProfile cusp = power_cusp(2.0);
};

// p=4/3, q=2, r=2, sigma=2, beta_g=1.25, alpha_g=0.5: alpha = 0.5 < delta/d = 0.75.
struct SingularityLimited {
    ProblemParams params = problem(4.0 / 3.0, 2.0, 2);
    WeightSpec g = weight(1.25, 0.5);
    WeightSpec v = weight(0.0);
    CuspProfile cusp = power_cusp(2.0);
};

} // namespace fixtures
