#include "peakwidths/cusp_empirics.hpp"

#include "peakwidths/exponents.hpp"
#include "peakwidths/hardy.hpp"
#include "peakwidths/parallel.hpp"
#include "peakwidths/partition.hpp"
#include "peakwidths/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace peakwidths {

namespace {

const double kLn2 = std::log(2.0);

// Unnormalized (x(1-x))^m as a polynomial in x.
struct BumpPoly {
    std::vector<double> coef;

    explicit BumpPoly(int m) : coef(2 * m + 1, 0.0) {
        double binom = 1.0;
        for (int k = 0; k <= m; ++k) {
            coef[m + k] = (k % 2 ? -1.0 : 1.0) * binom;
            binom = binom * (m - k) / (k + 1);
        }
    }

    [[nodiscard]] double eval(double x, int k) const {
        if (x < 0.0 || x > 1.0) return 0.0;
        double s = 0.0;
        for (int i = static_cast<int>(coef.size()) - 1; i >= k; --i) {
            double c = coef[i];
            for (int t = 0; t < k; ++t) c *= i - t;
            s = s * x + c;
        }
        return s;
    }

    // Breakpoints 0 = x_0 < ... < 1 separating sign changes of the k-th derivative.
    [[nodiscard]] std::vector<double> pieces(int k) const {
        std::vector<double> out{0.0};
        const int samples = 4096;
        double prevX = 1e-9, prevV = eval(prevX, k);
        for (int i = 1; i <= samples; ++i) {
            const double x = std::min(1.0 - 1e-9, static_cast<double>(i) / samples);
            const double v = eval(x, k);
            if ((v > 0.0) != (prevV > 0.0) && v != 0.0 && prevV != 0.0) {
                double lo = prevX, hi = x;
                for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    ((eval(mid, k) > 0.0) == (prevV > 0.0) ? lo : hi) = mid;
                }
                out.push_back(0.5 * (lo + hi));
            }
            prevX = x;
            prevV = v;
        }
        out.push_back(1.0);
        return out;
    }
};

// int_0^1 h over the sign pieces of the k-th derivative of the bump, graded at every breakpoint.
double integrate_pieces(const BumpPoly& bump, int k, const std::function<double(double)>& h) {
    const auto bp = bump.pieces(k);
    double s = 0.0;
    for (size_t i = 1; i < bp.size(); ++i) s += integrate_graded(h, bp[i - 1], bp[i], 1e-13).value;
    return s;
}

double log_binom(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

} // namespace

double TestFunctionFamily::profile(double x, int k) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    double s = 0.0;
    for (int i = static_cast<int>(coef.size()) - 1; i >= k; --i) {
        double c = coef[i];
        for (int t = 0; t < k; ++t) c *= i - t;
        s = s * x + c;
    }
    return s;
}

TestFunctionFamily bump_family(const ProblemParams& params, const WeightSpec& g, const CuspProfile& cusp, int jLo,
                               int jHi) {
    params.validate();
    if (jLo < 2) throw std::invalid_argument("bump slabs start at j = 2 (slab 2^-j < z < 2^-j+1 inside the domain)");
    if (jHi < jLo) throw std::invalid_argument("empty j range");
    const int r = params.r, d = params.d;
    const double p = params.p;
    const BumpPoly bump(r + 2);
    TestFunctionFamily fam;
    fam.r = r;
    fam.p = p;
    const double I0 = integrate_pieces(bump, r, [&](double x) { return std::pow(std::abs(bump.eval(x, r)), p); });
    fam.logKappa = -std::log(I0) / p;
    for (double c : bump.coef) fam.coef.push_back(c * std::exp(fam.logKappa));

    const int count = jHi - jLo + 1;
    fam.j.resize(count);
    fam.logC.resize(count);
    fam.logCFormula.resize(count);
    std::vector<std::string> errors(count);
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t idx) {
        const int j = jLo + static_cast<int>(idx);
        try {
            (void)lj_index(cusp, j);
        } catch (const std::exception& e) {
            errors[idx] = e.what();
            return;
        }
        const double lz0 = -j * kLn2;
        const double lg = g.log_at_log(lz0), lphi = cusp.log_at_log(lz0);
        auto h = [&](double u) {
            const double lz = lz0 + std::log1p(u);
            const double rel = -p * (g.log_at_log(lz) - lg) + (d - 1) * (cusp.log_at_log(lz) - lphi);
            return std::pow(std::abs(bump.eval(u, r)), p) * std::exp(rel);
        };
        const double Irel = integrate_pieces(bump, r, h);
        // ||d^r psi_j / g||_p^p = c^p kappa^p 2^{jrp} 2^{d-1} g_j^{-p} phi_j^{d-1} 2^{-j} Irel
        const double logRest = p * fam.logKappa + j * r * p * kLn2 + (d - 1) * kLn2 - p * lg + (d - 1) * lphi - j * kLn2 +
                               std::log(Irel);
        fam.j[idx] = j;
        fam.logC[idx] = -logRest / p;
        fam.logCFormula[idx] = lg - (d - 1) / p * lphi + j * kLn2 / p - j * r * kLn2;
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::invalid_argument("bump family: " + e);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < count; ++i) {
        lo = std::min(lo, fam.logC[i] - fam.logCFormula[i]);
        hi = std::max(hi, fam.logC[i] - fam.logCFormula[i]);
    }
    fam.formulaSpread = std::exp(hi - lo);
    return fam;
}

BumpFlatness bump_flatness(const ProblemParams& params, const WeightSpec& g, const WeightSpec& v,
                           const CuspProfile& cusp, int jLo, int jHi) {
    const TestFunctionFamily fam = bump_family(params, g, cusp, jLo, jHi);
    const DerivedQuantities dq = derive_quantities(params, g, v, cusp);
    const int r = params.r, d = params.d;
    const double q = params.q;
    const BumpPoly bump(r + 2);
    BumpFlatness out;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t i = 0; i < fam.j.size(); ++i) {
        const int j = fam.j[i];
        const double lz0 = -j * kLn2;
        const double lv = v.log_at_log(lz0), lphi = cusp.log_at_log(lz0);
        auto h = [&](double u) {
            const double lz = lz0 + std::log1p(u);
            const double rel = q * (v.log_at_log(lz) - lv) + (d - 1) * (cusp.log_at_log(lz) - lphi);
            return std::pow(bump.eval(u, 0), q) * std::exp(rel);
        };
        const double Irel = integrate_pieces(bump, 0, h);
        const double logNormQ = q * (fam.logC[i] + fam.logKappa) + (d - 1) * kLn2 + q * lv + (d - 1) * lphi - j * kLn2 +
                                std::log(Irel);
        const double logNorm = logNormQ / q;
        const double stat = logNorm + dq.alpha * std::log(static_cast<double>(j)) - dq.rho.log_value(j);
        out.j.push_back(j);
        out.logNorm.push_back(logNorm);
        out.statistic.push_back(std::exp(stat));
        lo = std::min(lo, stat);
        hi = std::max(hi, stat);
    }
    out.maxOverMin = std::exp(hi - lo);
    return out;
}

std::vector<Probe> smooth_probes() {
    struct Wave {
        const char* name;
        double a, b, c;
    };
    const Wave waves[] = {{"wave_z", 0.0, 2.0 * std::numbers::pi, 0.3},
                          {"wave_yz", 3.0 * std::numbers::pi, 4.0, 1.1},
                          {"wave_fast", 6.0, 9.0, 0.0}};
    std::vector<Probe> out;
    for (const auto& w : waves) {
        Probe pr;
        pr.name = w.name;
        pr.f = [w](double y, double z) { return std::cos(w.a * y + w.b * z + w.c); };
        pr.derivative = [w](int ky, int kz, double y, double z) {
            return std::pow(w.a, ky) * std::pow(w.b, kz) *
                   std::cos(w.a * y + w.b * z + w.c + 0.5 * std::numbers::pi * (ky + kz));
        };
        out.push_back(std::move(pr));
    }
    return out;
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
        ssr += e * e;
    }
    fit.rSquared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    fit.rmsResidual = std::sqrt(ssr / n);
    return fit;
}

DecayReport decay_experiment(const ProblemParams& params, const WeightSpec& g, const WeightSpec& v,
                             const CuspProfile& cusp, const std::vector<long long>& nList, const DecayOptions& options) {
    params.validate();
    if (params.d != 2) throw std::invalid_argument("decay experiment runs d = 2 only");
    const RegimeVerdict regime = validate_regime(params, g, v, cusp);
    if (!regime.ok) throw std::invalid_argument("standing hypotheses fail: " + regime.violations.front());
    const DerivedQuantities dq = derive_quantities(params, g, v, cusp);
    const WidthPrediction pred = theorem2_exponent(dq, params);
    if (pred.regime != "case1") throw std::invalid_argument("constructive scheme realizes case-1 rates only");
    if (nList.size() < 2) throw std::invalid_argument("nList needs at least two entries");

    std::vector<int> Ns;
    for (size_t i = 0; i < nList.size(); ++i) {
        const long long n = nList[i];
        if (i > 0 && n <= nList[i - 1]) throw std::invalid_argument("nList must be strictly increasing");
        if (n < 4 || (n & (n - 1)) != 0) throw std::invalid_argument("every n must be a power of 2^d");
        const int k = static_cast<int>(std::llround(std::log2(static_cast<double>(n))));
        if (k % params.d != 0) throw std::invalid_argument("every n must be a power of 2^d");
        Ns.push_back(k / params.d);
    }

    const int r = params.r;
    const double q = params.q, p = params.p;
    DecayReport report;
    report.predicted = -pred.thetaStar;
    for (const auto& pr : options.probes) report.probeNames.push_back(pr.name);

    const int jMax = (2 << (Ns.back() * params.d)) - 1;
    TestFunctionFamily fam;
    if (options.bumps) fam = bump_family(params, g, cusp, 2, jMax);

    // Tail constant from the A asymptotics at moderate depth.
    double tailConst = std::numeric_limits<double>::quiet_NaN();
    try {
        const AFlatnessReport a = asymptotic_A_check(g, v, cusp, params, log_grid(std::ldexp(1.0, -16), 0.25, 5));
        if (a.finite) tailConst = *std::max_element(a.ratio.begin(), a.ratio.end());
    } catch (const std::exception&) {
    }

    for (int N : Ns) {
        const PartitionSchedule schedule = PartitionSchedule::from_exponents(N, params.d, dq.alpha, dq.delta, dq.qhat);
        const CuspMesh mesh = build_schedule_mesh(cusp, schedule);
        DecayRow row;
        row.n = 1LL << schedule.Nd();
        row.cells = static_cast<long long>(mesh.cell_count());
        const double tailLog = mesh.tailExponent * kLn2;
        row.tailBound = tailConst * std::pow(tailLog, -dq.alpha) * dq.rho(tailLog);

        // cells are emitted slab by slab
        std::vector<std::size_t> start;
        std::vector<int> slabs;
        for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
            if (slabs.empty() || mesh.cells[k].slab != slabs.back()) {
                slabs.push_back(mesh.cells[k].slab);
                start.push_back(k);
            }
        }
        start.push_back(mesh.cells.size());

        if (options.bumps) {
            std::vector<double> bumpErr(slabs.size(), 0.0);
            parallel_for(slabs.size(), [&](std::size_t s) {
                const int j = slabs[s];
                const std::size_t fi = static_cast<std::size_t>(j - 2);
                const double lv = v.log_at_log(-j * kLn2);
                double acc = 0.0, logScale = 0.0;
                for (std::size_t k = start[s]; k < start[s + 1]; ++k) {
                    const CellNodes nodes = cell_nodes(cusp, mesh.cells[k], mesh.quadOrder);
                    logScale = nodes.logScale;
                    std::vector<double> vals(nodes.U.size());
                    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = fam.profile(nodes.U[i]);
                    const LocalFit fit = fit_local(nodes, vals, r, k);
                    for (std::size_t i = 0; i < vals.size(); ++i) {
                        const double res = vals[i] - eval_local(fit, r, nodes.U[i], nodes.Y[i]);
                        acc += nodes.w[i] * std::pow(std::abs(res), q) * std::exp(q * (v.log_at_log(nodes.logZ[i]) - lv));
                    }
                }
                bumpErr[s] = acc > 0.0 ? std::exp(fam.logC[fi] + lv + (logScale + std::log(acc)) / q) : 0.0;
            });
            for (std::size_t s = 0; s < slabs.size(); ++s) {
                if (bumpErr[s] > row.bumpWorst) {
                    row.bumpWorst = bumpErr[s];
                    row.bumpWorstJ = slabs[s];
                }
            }
            row.worstError = row.bumpWorst;
            row.worstProbe = "bump_j" + std::to_string(row.bumpWorstJ);
        }

        std::size_t probeCells = 0;
        while (probeCells < mesh.cells.size() && mesh.cells[probeCells].slab <= options.probeSlabLimit) ++probeCells;
        for (const auto& pr : options.probes) {
            std::vector<double> errPart(probeCells, 0.0), semiPart(probeCells, 0.0);
            parallel_for(probeCells, [&](std::size_t k) {
                const MeshCell& cell = mesh.cells[k];
                const CellNodes nodes = cell_nodes(cusp, cell, mesh.quadOrder);
                const double phiRef = std::exp(nodes.logPhiRef);
                std::vector<double> vals(nodes.U.size());
                double semi = 0.0;
                for (std::size_t i = 0; i < vals.size(); ++i) {
                    const double y = phiRef * nodes.Y[i], z = std::ldexp(1.0 + nodes.U[i], -cell.slab);
                    vals[i] = pr.f(y, z);
                    double grad2 = 0.0;
                    for (int ky = 0; ky <= r; ++ky) {
                        const double dv = pr.derivative(ky, r - ky, y, z);
                        grad2 += std::exp(log_binom(r, ky)) * dv * dv;
                    }
                    semi += nodes.w[i] * std::pow(grad2, 0.5 * p) * std::exp(-p * g.log_at_log(nodes.logZ[i]));
                }
                const LocalFit fit = fit_local(nodes, vals, r, k);
                double acc = 0.0;
                for (std::size_t i = 0; i < vals.size(); ++i) {
                    const double res = vals[i] - eval_local(fit, r, nodes.U[i], nodes.Y[i]);
                    acc += nodes.w[i] * std::pow(std::abs(res), q) * std::exp(q * v.log_at_log(nodes.logZ[i]));
                }
                errPart[k] = acc * std::exp(nodes.logScale);
                semiPart[k] = semi * std::exp(nodes.logScale);
            });
            double err = 0.0, semi = 0.0;
            for (std::size_t k = 0; k < probeCells; ++k) {
                err += errPart[k];
                semi += semiPart[k];
            }
            err = std::pow(err, 1.0 / q);
            semi = std::pow(semi, 1.0 / p);
            const double e = semi > 0.0 ? err / semi : err;
            row.probeErrors.push_back(e);
            if (e > row.worstError) {
                row.worstError = e;
                row.worstProbe = pr.name;
            }
        }
        report.nValues.push_back(static_cast<double>(row.cells));
        report.meshedErrors.push_back(row.worstError);
        report.errors.push_back(row.worstError + (std::isfinite(row.tailBound) ? row.tailBound : 0.0));
        report.rows.push_back(std::move(row));
    }

    double scale = 0.0;
    for (double e : report.meshedErrors) scale = std::max(scale, e);
    if (!(scale > 1e-14)) {
        report.exact = true;
        report.slope = std::numeric_limits<double>::quiet_NaN();
        report.intercept = std::numeric_limits<double>::quiet_NaN();
        report.rSquared = std::numeric_limits<double>::quiet_NaN();
        report.residual = report.meshedSlope = report.meshedRSquared = report.bumpSlope = report.slope;
        report.verdict = "exact";
        return report;
    }
    for (double e : report.meshedErrors)
        if (!(e > 0.0)) throw std::runtime_error("zero error at some n but not all; slope undefined");
    const LineFit meshed = loglog_fit(report.nValues, report.meshedErrors);
    report.meshedSlope = meshed.slope;
    report.meshedRSquared = meshed.rSquared;
    report.bumpSlope = std::numeric_limits<double>::quiet_NaN();
    if (options.bumps) {
        std::vector<double> bw;
        for (const auto& row : report.rows) bw.push_back(row.bumpWorst);
        report.bumpSlope = loglog_fit(report.nValues, bw).slope;
    }
    const LineFit fit = loglog_fit(report.nValues, report.errors);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.rSquared = fit.rSquared;
    report.residual = fit.rmsResidual;
    report.verdict = std::abs(fit.slope - report.predicted) <= 0.15 && fit.rSquared >= 0.98 ? "rate-recovered"
                                                                                             : "rate-missed";
    return report;
}

} // namespace peakwidths
