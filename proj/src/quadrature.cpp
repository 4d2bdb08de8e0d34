#include "peakwidths/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace peakwidths {

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

double cell_gl(const std::function<double(double)>& f, double a, double b, const GaussRule& rule, int parts) {
    double sum = 0.0;
    const double h = (b - a) / parts;
    for (int c = 0; c < parts; ++c) {
        const double lo = a + c * h, mid = lo + 0.5 * h, half = 0.5 * h;
        double s = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
        sum += s * half;
    }
    return sum;
}

struct EndResult {
    double value = 0.0;
    double tail = 0.0;
    bool finite = true;
    int levels = 0;
};

// Geometric cells from `far` toward the graded endpoint `near`.
// Stall counting starts once cells are 2^-48 of the half interval, so an integrand that
// peaks just outside the interval is not mistaken for an endpoint singularity.
constexpr int kStallStart = 48;

EndResult graded_half(const std::function<double(double)>& f, double near, double far, double relTol, int refine) {
    const GaussRule& rule = gauss_legendre(16);
    EndResult res;
    const double L = far - near;
    double prev = 0.0;
    int stall = 0;
    for (int k = 0; k < 1100; ++k) {
        const double outer = near + L * std::ldexp(1.0, -k);
        const double inner = near + L * std::ldexp(1.0, -k - 1);
        if (inner == outer || inner == near) break;
        const double c = L > 0 ? cell_gl(f, inner, outer, rule, refine) : cell_gl(f, outer, inner, rule, refine);
        res.value += c;
        res.levels = k + 1;
        if (!std::isfinite(res.value)) {
            res.finite = false;
            return res;
        }
        const double ac = std::abs(c), ap = std::abs(prev);
        if (k > 0 && ap > 0.0) {
            const double ratio = ac / ap;
            stall = (ratio >= 0.999 && k >= kStallStart) ? stall + 1 : 0;
            if (stall >= 10) {
                res.finite = false;
                return res;
            }
            if (ratio < 1.0 && k >= 3) {
                res.tail = ac * ratio / (1.0 - ratio);
                if (res.tail <= 0.5 * relTol * std::abs(res.value)) return res;
            } else {
                res.tail = ac;
            }
        } else if (ap == 0.0 && ac == 0.0 && k >= 60) {
            res.tail = 0.0;
            return res;
        }
        prev = c;
    }
    return res;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
    return it->second;
}

GradedIntegral integrate_graded(const std::function<double(double)>& f, double a, double b, double relTol,
                                int refine, GradeEnds ends) {
    GradedIntegral out;
    if (!(b > a)) return out;
    if (refine < 1) refine = 1;
    const double m = 0.5 * (a + b);
    EndResult left, right;
    if (ends == GradeEnds::Both || ends == GradeEnds::Left) {
        left = graded_half(f, a, m, relTol, refine);
    } else {
        left.value = cell_gl(f, a, m, gauss_legendre(16), 4 * refine);
    }
    if (ends == GradeEnds::Both || ends == GradeEnds::Right) {
        right = graded_half(f, b, m, relTol, refine);
    } else {
        right.value = cell_gl(f, m, b, gauss_legendre(16), 4 * refine);
    }
    out.value = left.value + right.value;
    out.tailEstimate = left.tail + right.tail;
    out.finite = left.finite && right.finite && std::isfinite(out.value);
    out.levels = left.levels + right.levels;
    return out;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order, int cells) {
    return cell_gl(f, a, b, gauss_legendre(order), cells);
}

} // namespace peakwidths
