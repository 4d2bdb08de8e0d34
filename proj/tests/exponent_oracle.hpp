#pragma once

// Second, independent evaluation of the width exponents written directly from the theorem
// statements. It shares no code with the library: every input is a raw number.

#include <algorithm>
#include <cmath>
#include <string>

namespace oracle {

enum Kind { Kolmogorov = 0, Linear = 1, Gelfand = 2 };

struct Tuple {
    double p, q;
    int r, d;
    Kind kind;
    double alphaG, alphaV, theta; // alpha = alphaG + alphaV + theta (d-1)(1/p - 1/q)
};

struct Verdict {
    bool covered;
    double thetaStar;
    double sigmaStar;
    int jStar;
};

inline bool tied(double a, double b) {
    return std::fabs(a - b) <= 1e-10 * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

inline double hat_q(double p, double q, Kind kind) {
    const double pprime = p / (p - 1);
    if (kind == Kolmogorov) return q;
    if (kind == Linear) return q < pprime ? q : pprime;
    return pprime;
}

inline Verdict main_theorem(const Tuple& t) {
    const double delta = t.r + t.d / t.q - t.d / t.p;
    const double a = t.alphaG + t.alphaV + t.theta * (t.d - 1) * (1 / t.p - 1 / t.q);
    const double qh = hat_q(t.p, t.q, t.kind);
    const double s = delta / t.d;
    if (t.p == t.q || (t.p < t.q && qh <= 2)) {
        if (tied(a, s)) return {false, 0, 0, 0};
        if (s < a) return {true, s, 0, 0};
        return {true, a, 1, 0};
    }
    const double m = std::min(0.5 - 1 / qh, 1 / t.p - 1 / t.q);
    const double th[4] = {s + m, qh * s / 2, a + m, qh * a / 2};
    const double sg[4] = {0, 0, 1, qh / 2};
    int j = 0;
    for (int k = 1; k < 4; ++k)
        if (th[k] < th[j]) j = k;
    for (int k = 0; k < 4; ++k)
        if (k != j && tied(th[k], th[j])) return {false, 0, 0, 0};
    return {true, th[j], sg[j], j + 1};
}

// Cube widths: returns NaN when uncovered.
inline double cube_theta(double p, double q, int r, int d, Kind kind) {
    const double delta = r + d / q - d / p;
    const double qh = hat_q(p, q, kind);
    if (p >= q || qh <= 2) return delta / d;
    const double x = delta / d + std::min(0.5 - 1 / qh, 1 / p - 1 / q);
    const double y = qh * delta / (2 * d);
    if (tied(x, y)) return std::nan("");
    return std::min(x, y);
}

inline double Phi(double n, double nu, double p, double q) {
    const double e = 1 / q - 1 / p;
    if (2 <= p) {
        if (n == 0) return 1;
        return std::min(1.0, std::pow(std::pow(nu, 1 / q) * std::pow(n, -0.5), (1 / p - 1 / q) / (0.5 - 1 / q)));
    }
    if (2 < q) {
        const double inner = n == 0 ? 1.0 : std::min(1.0, std::pow(nu, 1 / q) * std::pow(n, -0.5));
        return std::max(std::pow(nu, e), inner * std::pow(1 - n / nu, 0.5));
    }
    return std::max(std::pow(nu, e), std::pow(1 - n / nu, e / (1 - 2 / p)));
}

inline double Psi(double n, double nu, double p, double q) {
    const double pp = p / (p - 1), qq = q / (q - 1);
    return q <= pp ? Phi(n, nu, p, q) : Phi(n, nu, qq, pp);
}

inline double GelfandOrder(double n, double nu, double p, double q) {
    return Phi(n, nu, q / (q - 1), p / (p - 1));
}

} // namespace oracle
