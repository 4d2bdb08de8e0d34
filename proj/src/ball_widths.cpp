#include "peakwidths/ball_widths.hpp"

#include "peakwidths/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace peakwidths {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double lp_norm(const VectorXd& v, double p) {
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), p);
    return std::pow(acc, 1.0 / p);
}

// sign(v) |v|^{s-1}
VectorXd duality_map(const VectorXd& v, double s) {
    VectorXd out(v.size());
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        out[i] = a == 0.0 ? 0.0 : std::copysign(s == 1.0 ? 1.0 : std::pow(a, s - 1.0), v[i]);
    }
    return out;
}

MatrixXd orthonormalize(const MatrixXd& A) {
    Eigen::HouseholderQR<MatrixXd> qr(A);
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(A.rows(), A.cols());
    return Q;
}

// Residual x - B c* of the best l_q approximation from span B.
VectorXd best_residual(const VectorXd& x, const MatrixXd& B, double q) {
    const int n = static_cast<int>(B.cols()), nu = static_cast<int>(B.rows());
    if (n == 0) return x;
    VectorXd c = B.colPivHouseholderQr().solve(x);
    if (q == 2.0) return x - B * c;
    if (q == 1.0) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        VectorXd best = x - B * c;
        double bestVal = best.cwiseAbs().sum();
        MatrixXd Bs(n, n);
        VectorXd xs(n);
        for (;;) {
            for (int a = 0; a < n; ++a) {
                Bs.row(a) = B.row(idx[a]);
                xs[a] = x[idx[a]];
            }
            Eigen::FullPivLU<MatrixXd> lu(Bs);
            if (lu.isInvertible()) {
                VectorXd r = x - B * lu.solve(xs);
                const double v = r.cwiseAbs().sum();
                if (v < bestVal) {
                    bestVal = v;
                    best = r;
                }
            }
            int k = n - 1;
            while (k >= 0 && idx[k] == nu - n + k) --k;
            if (k < 0) break;
            ++idx[k];
            for (int a = k + 1; a < n; ++a) idx[a] = idx[a - 1] + 1;
        }
        return best;
    }
    // Damped Newton on sum |x - Bc|^q; plain IRLS oscillates for q > 2.
    auto objective = [q](const VectorXd& res) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < res.size(); ++i) s += std::pow(std::abs(res[i]), q);
        return s;
    };
    VectorXd r = x - B * c;
    double f = objective(r);
    const double floor = 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff());
    for (int it = 0; it < 100 && f > 0.0; ++it) {
        VectorXd a(nu), h(nu);
        for (int i = 0; i < nu; ++i) {
            const double ar = std::abs(r[i]);
            a[i] = std::copysign(std::pow(ar, q - 1.0), r[i]);
            h[i] = std::pow(std::max(ar, floor), q - 2.0);
        }
        const VectorXd g = B.transpose() * a;
        const MatrixXd H = (q - 1.0) * (B.transpose() * h.asDiagonal() * B);
        const VectorXd dc = H.ldlt().solve(g);
        double t = 1.0, fn = f;
        VectorXd cn = c;
        for (int ls = 0; ls < 40; ++ls) {
            cn = c + t * dc;
            fn = objective(x - B * cn);
            if (fn < f) break;
            t *= 0.5;
        }
        if (!(fn < f)) break;
        const bool done = f - fn <= 1e-15 * f;
        c = cn;
        f = fn;
        r = x - B * c;
        if (done) break;
    }
    return r;
}

// Halton points in [-1, 1]^dim.
std::vector<VectorXd> halton(int count, int dim, int offset) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<VectorXd> pts;
    for (int i = 0; i < count; ++i) {
        VectorXd v(dim);
        for (int k = 0; k < dim; ++k) {
            double f = 1.0, r = 0.0;
            int m = i + 1 + offset;
            while (m > 0) {
                f /= primes[k];
                r += f * (m % primes[k]);
                m /= primes[k];
            }
            v[k] = 2.0 * r - 1.0;
        }
        pts.push_back(v);
    }
    return pts;
}

// Coordinate vectors and sign patterns: the extreme directions of the norm comparison.
std::vector<VectorXd> extreme_directions(int nu) {
    std::vector<VectorXd> out;
    for (int i = 0; i < nu; ++i) out.push_back(VectorXd::Unit(nu, i));
    for (int mask = 0; mask < (1 << (nu - 1)); ++mask) {
        VectorXd v = VectorXd::Ones(nu);
        for (int i = 1; i < nu; ++i)
            if (mask & (1 << (i - 1))) v[i] = -1.0;
        out.push_back(v);
    }
    return out;
}

std::vector<VectorXd> candidate_set(int nu, int samples, int offset) {
    auto pts = halton(samples, nu, offset);
    for (auto& e : extreme_directions(nu)) pts.push_back(e);
    return pts;
}

struct Inner {
    double value = 0.0;
    std::vector<int> top; // candidate indices sorted by value, best first
};

// ---------------- Kolmogorov ----------------

double kol_value(const VectorXd& x, const MatrixXd& B, double p, double q) {
    const double nx = lp_norm(x, p);
    if (nx == 0.0) return 0.0;
    return lp_norm(best_residual(x / nx, B, q), q);
}

double kol_ascent(VectorXd x, const MatrixXd& B, double p, double q, int steps) {
    const double pp = p / (p - 1.0);
    x /= lp_norm(x, p);
    double val = lp_norm(best_residual(x, B, q), q);
    for (int s = 0; s < steps; ++s) {
        const VectorXd r = best_residual(x, B, q);
        VectorXd y = duality_map(duality_map(r, q), pp);
        const double ny = lp_norm(y, p);
        if (ny == 0.0) break;
        y /= ny;
        const double vy = lp_norm(best_residual(y, B, q), q);
        if (!(vy > val + 1e-15)) break;
        x = y;
        val = vy;
    }
    return val;
}

Inner kol_inner(const MatrixXd& B, double p, double q, const std::vector<VectorXd>& cands, int steps, int starts) {
    std::vector<double> vals(cands.size());
    for (size_t i = 0; i < cands.size(); ++i) vals[i] = kol_value(cands[i], B, p, q);
    std::vector<int> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    Inner in;
    in.top = order;
    in.value = vals[order[0]];
    for (int k = 0; k < std::min<int>(starts, static_cast<int>(order.size())); ++k)
        in.value = std::max(in.value, kol_ascent(cands[order[k]], B, p, q, steps));
    return in;
}

// ---------------- Gelfand ----------------

double gel_ratio(const VectorXd& y, double p, double q) {
    const double np = lp_norm(y, p);
    return np == 0.0 ? 0.0 : lp_norm(y, q) / np;
}

double gel_ascent(VectorXd c, const MatrixXd& K, double p, double q, int steps) {
    c.normalize();
    double val = gel_ratio(K * c, p, q);
    double step = 0.25;
    for (int s = 0; s < steps && step > 1e-12; ++s) {
        const VectorXd y = K * c;
        const double nq = lp_norm(y, q), np = lp_norm(y, p);
        if (nq == 0.0 || np == 0.0) break;
        const VectorXd gq = duality_map(y, q) / std::pow(nq, q - 1.0);
        const VectorXd gp = duality_map(y, p) / std::pow(np, p - 1.0);
        VectorXd grad = K.transpose() * (gq / np - (nq / (np * np)) * gp);
        const double gn = grad.norm();
        if (gn < 1e-15) break;
        grad /= gn;
        bool moved = false;
        while (step > 1e-12) {
            VectorXd cn = (c + step * grad).normalized();
            const double vn = gel_ratio(K * cn, p, q);
            if (vn > val + 1e-15) {
                c = cn;
                val = vn;
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return val;
}

Inner gel_inner(const MatrixXd& K, double p, double q, const std::vector<VectorXd>& cands, int steps, int starts) {
    // candidates live in R^nu and are pulled back to kernel coordinates
    std::vector<VectorXd> cs;
    cs.reserve(cands.size());
    std::vector<double> vals;
    for (const auto& x : cands) {
        VectorXd c = K.transpose() * x;
        vals.push_back(gel_ratio(K * c, p, q));
        cs.push_back(c);
    }
    std::vector<int> order(cs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    Inner in;
    in.top = order;
    in.value = vals[order[0]];
    for (int k = 0; k < std::min<int>(starts, static_cast<int>(order.size())); ++k)
        if (cs[order[k]].norm() > 0.0) in.value = std::max(in.value, gel_ascent(cs[order[k]], K, p, q, steps));
    return in;
}

// ---------------- shared outer search ----------------

template <class InnerFn>
BallWidthEstimate outer_search(int nu, int cols, const BallWidthOptions& opt, InnerFn inner) {
    const auto cands = candidate_set(nu, opt.samples, 0);
    struct Run {
        double value = std::numeric_limits<double>::infinity();
        double sampled = 0.0;
        MatrixXd basis;
    };
    std::vector<Run> runs(std::max(1, opt.restarts));
    parallel_for(runs.size(), [&](size_t k) {
        std::mt19937_64 rng(split_seed(opt.seed, k));
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto randn = [&](int r, int c) {
            MatrixXd m(r, c);
            for (int j = 0; j < c; ++j)
                for (int i = 0; i < r; ++i) m(i, j) = gauss(rng);
            return m;
        };
        MatrixXd B = orthonormalize(randn(nu, cols));
        Inner full = inner(B, cands, opt.ascentSteps, 8);
        double val = full.value;
        std::vector<VectorXd> active;
        auto refresh_active = [&](const Inner& in) {
            active.clear();
            for (int i = 0; i < std::min<int>(32, static_cast<int>(in.top.size())); ++i) active.push_back(cands[in.top[i]]);
        };
        refresh_active(full);
        double sigma = 0.5;
        int fails = 0;
        for (int step = 0; step < opt.outerSteps && sigma > 1e-3; ++step) {
            MatrixXd Bn = orthonormalize(B + sigma * randn(nu, cols));
            const Inner quick = inner(Bn, active, 5, 4);
            if (quick.value < val - 1e-15) {
                const Inner fullN = inner(Bn, cands, opt.ascentSteps, 8);
                if (fullN.value < val - 1e-15) {
                    B = Bn;
                    val = fullN.value;
                    refresh_active(fullN);
                    fails = 0;
                    continue;
                }
            }
            if (++fails >= 6) {
                sigma *= 0.5;
                fails = 0;
            }
        }
        runs[k].value = val;
        runs[k].sampled = val;
        runs[k].basis = B;
    });
    size_t best = 0;
    for (size_t k = 1; k < runs.size(); ++k)
        if (runs[k].value < runs[best].value) best = k;
    BallWidthEstimate est;
    est.basis = runs[best].basis;
    est.innerSup = runs[best].sampled;
    const auto audit = candidate_set(nu, 4 * opt.samples, opt.samples + 7);
    est.estimateUpper = std::max(est.innerSup, inner(est.basis, audit, opt.ascentSteps, 16).value);
    return est;
}

} // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void BallWidthProblem::validate() const {
    if (nu < 1 || nu > 6) throw std::invalid_argument("nu must lie in [1, 6]");
    if (n < 0 || n > nu) throw std::invalid_argument("n must lie in [0, nu]");
    if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("p and q must be finite and >= 1");
}

double lq_distance(const Eigen::VectorXd& x, const Eigen::MatrixXd& B, double q) {
    return lp_norm(best_residual(x, B, q), q);
}

BallWidthEstimate kolmogorov_width_est(const BallWidthProblem& prob, const BallWidthOptions& opt) {
    prob.validate();
    if (prob.kind != BallWidthKind::Kolmogorov) throw std::invalid_argument("kolmogorov_width_est needs kind Kolmogorov");
    BallWidthEstimate est;
    if (prob.n >= prob.nu) {
        est.basis = MatrixXd::Identity(prob.nu, prob.nu);
        return est;
    }
    auto inner = [&](const MatrixXd& B, const std::vector<VectorXd>& c, int steps, int starts) {
        return kol_inner(B, prob.p, prob.q, c, steps, starts);
    };
    if (prob.n == 0) {
        est.basis = MatrixXd(prob.nu, 0);
        const auto cands = candidate_set(prob.nu, opt.samples, 0);
        est.innerSup = inner(est.basis, cands, opt.ascentSteps, 8).value;
        est.estimateUpper = est.innerSup;
        return est;
    }
    return outer_search(prob.nu, prob.n, opt, inner);
}

BallWidthEstimate gelfand_width_est(const BallWidthProblem& prob, const BallWidthOptions& opt) {
    prob.validate();
    if (prob.kind != BallWidthKind::Gelfand) throw std::invalid_argument("gelfand_width_est needs kind Gelfand");
    BallWidthEstimate est;
    if (prob.n >= prob.nu) {
        est.basis = MatrixXd(prob.nu, 0);
        return est;
    }
    auto inner = [&](const MatrixXd& K, const std::vector<VectorXd>& c, int steps, int starts) {
        return gel_inner(K, prob.p, prob.q, c, steps, starts);
    };
    if (prob.n == 0) {
        est.basis = MatrixXd::Identity(prob.nu, prob.nu);
        const auto cands = candidate_set(prob.nu, opt.samples, 0);
        est.innerSup = inner(est.basis, cands, opt.ascentSteps, 8).value;
        est.estimateUpper = est.innerSup;
        return est;
    }
    return outer_search(prob.nu, prob.nu - prob.n, opt, inner);
}

} // namespace peakwidths
