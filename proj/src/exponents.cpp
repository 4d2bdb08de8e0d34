#include "peakwidths/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace peakwidths {

namespace {

double conj(double p) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

double qhat_cube(double p, double q, WidthKind kind) {
    switch (kind) {
    case WidthKind::Kolmogorov: return q;
    case WidthKind::Linear: return std::min(q, conj(p));
    case WidthKind::Gelfand: return conj(p);
    }
    return q;
}

} // namespace

bool exponent_tie(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    return std::abs(a - b) <= kTieTolerance * scale;
}

WidthPrediction theorem2_exponent(const DerivedQuantities& dq, const ProblemParams& params) {
    WidthPrediction out;
    const double p = params.p, q = params.q;
    const double dd = dq.delta / params.d;
    const double qh = dq.qhat;
    if (!(p > 1.0) || !(q >= p)) {
        out.regime = "boundary-uncovered";
        out.note = "outside 1 < p ≤ q";
        return out;
    }

    if (p == q || qh <= 2.0) {
        if (exponent_tie(dq.alpha, dd)) {
            out.regime = "boundary-uncovered";
            out.note = "α = δ/d excluded by the case-1 hypothesis α ≠ δ/d";
            return out;
        }
        out.covered = true;
        out.regime = "case1";
        if (dd < dq.alpha) {
            out.thetaStar = dd;
            out.sigmaStar = 0.0;
            out.note = "δ/d < α: smoothness-limited rate";
        } else {
            out.thetaStar = dq.alpha;
            out.sigmaStar = 1.0;
            out.note = "α < δ/d: singularity-limited rate; log factor ρ(n) inferred from the constructive bound";
        }
        return out;
    }

    const double mu = std::min(0.5 - 1.0 / qh, 1.0 / p - 1.0 / q);
    out.hasThetas = true;
    out.theta = {dd + mu, qh * dd / 2.0, dq.alpha + mu, qh * dq.alpha / 2.0};
    out.sigma = {0.0, 0.0, 1.0, qh / 2.0};
    int best = 0;
    for (int j = 1; j < 4; ++j)
        if (out.theta[j] < out.theta[best]) best = j;
    for (int j = 0; j < 4; ++j) {
        if (j != best && exponent_tie(out.theta[j], out.theta[best])) {
            out.regime = "boundary-uncovered";
            out.note = "no strict unique minimizer: θ" + std::to_string(best + 1) + " ties θ" + std::to_string(j + 1);
            return out;
        }
    }
    out.covered = true;
    out.jStar = best + 1;
    out.regime = "case2-j" + std::to_string(best + 1);
    out.thetaStar = out.theta[best];
    out.sigmaStar = out.sigma[best];
    return out;
}

CubeExponent theoremD_exponent(double p, double q, int r, int d, WidthKind kind) {
    if (!(p >= 1.0) || !(q >= 1.0) || r < 1 || d < 1) throw std::invalid_argument("invalid cube width parameters");
    const double dd = static_cast<double>(r) / d + inv(q) - inv(p);
    if (!(dd > 0.0)) throw std::invalid_argument("embedding exponent nonpositive");
    CubeExponent out;
    const double qh = qhat_cube(p, q, kind);
    if (p >= q || qh <= 2.0) {
        out.covered = true;
        out.branch = 1;
        out.theta = dd;
        return out;
    }
    const double a = dd + std::min(0.5 - inv(qh), inv(p) - inv(q));
    const double b = qh * dd / 2.0;
    out.branch = 2;
    if (exponent_tie(a, b)) {
        out.note = "branch-2 expressions coincide";
        return out;
    }
    out.covered = true;
    out.theta = std::min(a, b);
    return out;
}

double gluskin_phi(double n, double nu, double p, double q) {
    if (!(p > 1.0) || !(q > p) || !std::isfinite(q)) throw std::invalid_argument("gluskin_phi requires 1 < p < q < inf");
    if (!(n >= 0.0) || !(nu >= n) || !(nu > 0.0)) throw std::invalid_argument("gluskin_phi requires 0 <= n <= nu");
    const double a = 1.0 / q - 1.0 / p; // negative
    if (p >= 2.0) {
        if (n == 0.0) return 1.0;
        const double base = std::pow(nu, 1.0 / q) / std::sqrt(n);
        return std::min(1.0, std::pow(base, (1.0 / p - 1.0 / q) / (0.5 - 1.0 / q)));
    }
    const double floorTerm = std::pow(nu, a);
    if (q > 2.0) {
        const double m = n == 0.0 ? 1.0 : std::min(1.0, std::pow(nu, 1.0 / q) / std::sqrt(n));
        return std::max(floorTerm, m * std::sqrt(1.0 - n / nu));
    }
    return std::max(floorTerm, std::pow(1.0 - n / nu, a / (1.0 - 2.0 / p)));
}

double gluskin_psi(double n, double nu, double p, double q) {
    const double pp = p / (p - 1.0);
    if (q <= pp) return gluskin_phi(n, nu, p, q);
    return gluskin_phi(n, nu, q / (q - 1.0), pp);
}

double gelfand_order(double n, double nu, double p, double q) {
    return gluskin_phi(n, nu, q / (q - 1.0), p / (p - 1.0));
}

} // namespace peakwidths
