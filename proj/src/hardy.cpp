#include "peakwidths/hardy.hpp"

#include "peakwidths/parallel.hpp"
#include "peakwidths/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace peakwidths {

namespace {

using Integrand = std::function<double(double t, double x)>;

// sup over t in (lo, hi) of (int_lo^t left(t, .))^{1/q} (int_t^hi right(t, .))^{1/pp}
struct SupProblem {
    double lo = 0.0, hi = 1.0, q = 2.0, pp = 2.0, tol = 1e-10;
    Integrand left, right;
};

struct SupResult {
    double value = 0.0;
    double argmax = 0.0;
    double quadError = 0.0;
    bool infinite = false;
};

struct Eval {
    double value = 0.0;
    bool infinite = false;
};

Eval product_at(const SupProblem& sp, double t, int refine) {
    Eval e;
    auto L = integrate_graded([&](double x) { return sp.left(t, x); }, sp.lo, t, sp.tol, refine);
    auto R = integrate_graded([&](double x) { return sp.right(t, x); }, t, sp.hi, sp.tol, refine);
    if (!L.finite || !R.finite) {
        e.infinite = true;
        e.value = std::numeric_limits<double>::infinity();
        return e;
    }
    e.value = std::pow(std::max(L.value, 0.0), 1.0 / sp.q) * std::pow(std::max(R.value, 0.0), 1.0 / sp.pp);
    return e;
}

SupResult maximize(const SupProblem& sp, int refine) {
    SupResult res;
    const double len = sp.hi - sp.lo;
    std::vector<double> xs;
    const int half = 100;
    for (int i = 0; i < half; ++i) xs.push_back(std::pow(10.0, -9.0 + (9.0 - std::log10(2.0)) * i / (half - 1)));
    std::vector<double> ts;
    for (double x : xs) ts.push_back(sp.lo + len * x);
    for (int i = half - 2; i >= 0; --i) ts.push_back(sp.hi - len * xs[i]);
    ts.push_back(sp.hi - len * 1e-9 * 0.5);

    std::vector<Eval> vals(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        vals[i] = product_at(sp, ts[i], refine);
        if (vals[i].infinite) {
            res.infinite = true;
            res.value = std::numeric_limits<double>::infinity();
            res.argmax = ts[i];
            return res;
        }
    }
    size_t best = 0;
    for (size_t i = 1; i < ts.size(); ++i)
        if (vals[i].value > vals[best].value) best = i;

    double a = best == 0 ? sp.lo : ts[best - 1];
    double b = best + 1 == ts.size() ? sp.hi : ts[best + 1];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = product_at(sp, c, refine).value, fd = product_at(sp, d, refine).value;
    const double stop = 1e-10 * std::max(len, std::numeric_limits<double>::min());
    while (b - a > stop) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = product_at(sp, c, refine).value;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = product_at(sp, d, refine).value;
        }
    }
    double tBest = fc >= fd ? c : d;
    double vBest = std::max(fc, fd);
    if (vals[best].value > vBest) {
        tBest = ts[best];
        vBest = vals[best].value;
    }
    res.value = vBest;
    res.argmax = tBest;
    const double fine = product_at(sp, tBest, 2 * refine).value;
    res.quadError = 2.0 * std::abs(fine - vBest) + sp.tol * vBest + 1e-15;
    return res;
}

double cpow(double base, double e) { return e == 0.0 ? 1.0 : std::pow(base, e); }

} // namespace

void KernelSpec::validate() const {
    if (!(t1 > t0)) throw std::invalid_argument("kernel interval must satisfy t0 < t1");
    if (r < 1) throw std::invalid_argument("kernel order r must be >= 1");
    if (!(p > 1.0) || !(q >= p) || !std::isfinite(q)) throw std::invalid_argument("kernel exponents need 1 < p <= q < inf");
    if (!u || !w) throw std::invalid_argument("kernel weights must be set");
}

double EmbeddingWindow::radius(const CuspProfile& cusp) const { return lambda * cusp(tauPlus); }

HardyResult stepanov_B(const KernelSpec& spec, double tol, int refine) {
    spec.validate();
    const double q = spec.q, pp = spec.p / (spec.p - 1.0);
    const double rm1 = spec.r - 1.0;
    SupProblem s0{spec.t0, spec.t1, q, pp, tol,
                  [&](double t, double x) { return cpow(t - x, q * rm1) * std::pow(spec.w(x), q); },
                  [&](double, double x) { return std::pow(spec.u(x), pp); }};
    SupProblem s1{spec.t0, spec.t1, q, pp, tol,
                  [&](double, double x) { return std::pow(spec.w(x), q); },
                  [&](double t, double x) { return cpow(x - t, pp * rm1) * std::pow(spec.u(x), pp); }};
    HardyResult out;
    const SupResult r0 = maximize(s0, refine);
    const SupResult r1 = spec.r == 1 ? r0 : maximize(s1, refine);
    out.c0 = r0.value;
    out.c1 = r1.value;
    out.argmax0 = r0.argmax;
    out.argmax1 = r1.argmax;
    out.quadError = std::max(r0.quadError, r1.quadError);
    out.infinite = r0.infinite || r1.infinite;
    if (out.infinite) out.note = "constant infinite";
    return out;
}

KernelSpec embedding_kernel(const WeightSpec& g, const WeightSpec& v, const CuspProfile& cusp,
                            const ProblemParams& params, double t0, double t1) {
    const double dm1 = params.d - 1.0;
    const double p = params.p, q = params.q;
    KernelSpec spec;
    spec.r = params.r;
    spec.p = p;
    spec.q = q;
    spec.t0 = t0;
    spec.t1 = t1;
    spec.u = [g, cusp, dm1, p](double z) {
        const double lz = std::log(z);
        return std::exp(g.log_at_log(lz) - dm1 / p * cusp.log_at_log(lz));
    };
    spec.w = [v, cusp, dm1, q](double z) {
        const double lz = std::log(z);
        return std::exp(v.log_at_log(lz) + dm1 / q * cusp.log_at_log(lz));
    };
    return spec;
}

HardyResult embedding_A(const EmbeddingWindow& window, const WeightSpec& g, const WeightSpec& v,
                        const CuspProfile& cusp, const ProblemParams& params, double tol, int refine) {
    params.validate();
    if (window.tauMinus < 0.0 || window.tauPlus > 0.5 || window.tauMinus > window.tauPlus)
        throw std::invalid_argument("window must satisfy 0 <= tauMinus <= tauPlus <= 1/2");
    if (!(window.lambda > 0.0) || !(window.lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    HardyResult out;
    if (window.tauMinus == window.tauPlus) return out;
    if (window.tauMinus >= window.tauPlus - window.radius(cusp))
        throw std::invalid_argument("window must satisfy tauMinus < tauPlus - lambda * phi(tauPlus)");

    const KernelSpec spec = embedding_kernel(g, v, cusp, params, window.tauMinus, window.tauPlus);
    const HardyResult b = stepanov_B(spec, tol, refine);
    out.c0 = b.c1;
    out.c1 = b.c0;
    out.argmax0 = b.argmax1;
    out.argmax1 = b.argmax0;
    out.quadError = b.quadError;
    out.infinite = b.infinite;
    out.note = b.note;
    return out;
}

double discretized_operator_norm(const KernelSpec& spec, int gridSize, std::uint64_t seed) {
    spec.validate();
    if (gridSize < 16) throw std::invalid_argument("gridSize must be >= 16");
    const int n = gridSize;
    const double L = spec.t1 - spec.t0;
    const double rho = std::pow(std::ldexp(1.0, -30), 1.0 / (n - 1));
    std::vector<double> x(n + 1);
    x[0] = spec.t0;
    for (int i = 1; i <= n; ++i) x[i] = spec.t0 + L * std::pow(rho, n - i);
    x[n] = spec.t1;
    std::vector<double> mid(n), h(n), uu(n), ww(n);
    for (int i = 0; i < n; ++i) {
        mid[i] = 0.5 * (x[i] + x[i + 1]);
        h[i] = x[i + 1] - x[i];
        uu[i] = spec.u(mid[i]);
        ww[i] = spec.w(mid[i]);
    }
    const double pp = spec.p / (spec.p - 1.0);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double rowScale = std::pow(h[i], 1.0 / spec.q) * ww[i];
        if (rowScale == 0.0) continue;
        M(i, i) = rowScale * uu[i] * std::pow(0.5 * h[i], spec.r) / spec.r * std::pow(h[i], -1.0 / spec.p);
        for (int k = i + 1; k < n; ++k)
            M(i, k) = rowScale * cpow(mid[k] - mid[i], spec.r - 1.0) * uu[k] * h[k] * std::pow(h[k], -1.0 / spec.p);
    }
    if (M.cwiseAbs().maxCoeff() == 0.0) return 0.0;

    auto lpnorm = [](const Eigen::VectorXd& v, double s) {
        double acc = 0.0;
        for (int i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), s);
        return std::pow(acc, 1.0 / s);
    };

    if (spec.p == 2.0 && spec.q == 2.0) {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
        double lam = 0.0;
        for (int it = 0; it < 5000; ++it) {
            Eigen::VectorXd w = M.transpose() * (M * v);
            const double nl = w.norm();
            if (nl == 0.0) return 0.0;
            v = w / nl;
            if (std::abs(nl - lam) <= 1e-14 * nl) {
                lam = nl;
                break;
            }
            lam = nl;
        }
        return std::sqrt(lam);
    }

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    double best = 0.0;
    for (int restart = 0; restart < 20; ++restart) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = unif(rng);
        v /= lpnorm(v, spec.p);
        double val = 0.0;
        for (int it = 0; it < 2000; ++it) {
            Eigen::VectorXd y = M * v;
            const double ny = lpnorm(y, spec.q);
            if (ny == 0.0) break;
            for (int i = 0; i < n; ++i) y[i] = std::copysign(std::pow(std::abs(y[i]), spec.q - 1.0), y[i]);
            Eigen::VectorXd z = M.transpose() * y;
            for (int i = 0; i < n; ++i) z[i] = std::copysign(std::pow(std::abs(z[i]), pp - 1.0), z[i]);
            const double nz = lpnorm(z, spec.p);
            if (nz == 0.0) break;
            v = z / nz;
            const double next = lpnorm(M * v, spec.q);
            if (std::abs(next - val) <= 1e-13 * next) {
                val = next;
                break;
            }
            val = next;
        }
        best = std::max(best, val);
    }
    return best;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> out;
    if (count == 1) return {lo};
    for (int i = 0; i < count; ++i) out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
    return out;
}

AFlatnessReport asymptotic_A_check(const WeightSpec& g, const WeightSpec& v, const CuspProfile& cusp,
                                   const ProblemParams& params, const std::vector<double>& tauGrid, double tol) {
    AFlatnessReport rep;
    const DerivedQuantities dq = derive_quantities(params, g, v, cusp);
    const size_t n = tauGrid.size();
    rep.tau = tauGrid;
    rep.A.assign(n, 0.0);
    rep.argmaxT.assign(n, 0.0);
    rep.quadError.assign(n, 0.0);
    rep.ratio.assign(n, 0.0);
    std::vector<char> inf(n, 0);
    parallel_for(n, [&](size_t i) {
        const double tau = tauGrid[i];
        const HardyResult a = embedding_A({0.0, tau, 0.5}, g, v, cusp, params, tol);
        rep.A[i] = a.value();
        rep.argmaxT[i] = a.argmax();
        rep.quadError[i] = a.quadError;
        inf[i] = a.infinite;
        const double s = std::abs(std::log(tau));
        rep.ratio[i] = a.value() * std::pow(s, dq.alpha) / dq.rho(s);
    });
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (inf[i] || !std::isfinite(rep.ratio[i])) rep.finite = false;
        lo = std::min(lo, rep.ratio[i]);
        hi = std::max(hi, rep.ratio[i]);
    }
    rep.maxOverMin = (rep.finite && lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace peakwidths
