#include "peakwidths/cusp_mesh.hpp"

#include "peakwidths/parallel.hpp"
#include "peakwidths/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace peakwidths {

namespace {

const double kLn2 = std::log(2.0);

void require_shape(const CuspProfile& profile) {
    const auto bad = profile.shape_violations();
    if (!bad.empty()) throw std::invalid_argument("cusp profile rejected: " + bad.front());
}

double log_phi_at_slab(const CuspProfile& profile, int slab) { return profile.log_at_log(-slab * kLn2); }

} // namespace

double cell_aspect(const CuspProfile& profile, const MeshCell& cell) {
    const double um = 0.5 * (cell.u0 + cell.u1);
    const double lz = -cell.slab * kLn2 + std::log1p(um);
    return (cell.u1 - cell.u0) / (cell.eta1 - cell.eta0) * std::exp(-cell.slab * kLn2 - profile.log_at_log(lz));
}

CuspMesh build_mesh(const CuspProfile& profile, const PartitionSchedule& schedule, long long nTarget) {
    if (nTarget < 16) throw std::invalid_argument("nTarget must be >= 16");
    require_shape(profile);
    const long long slabCap = (1LL << std::min(schedule.Nd() + 1, 40)) - 1;
    const int Jcap = static_cast<int>(std::min<long long>(14, slabCap));
    if (Jcap < 2) throw std::invalid_argument("schedule too shallow for a mesh");

    // y-split count of the z-cell [2^-j(1+u0), 2^-j(1+u0+du)]
    auto ysplit = [&](int j, double u0, double du) {
        const double lz = -j * kLn2 + std::log1p(u0 + 0.5 * du);
        const double ratio = std::exp(kLn2 + profile.log_at_log(lz) + j * kLn2 - std::log(du));
        return std::max(1LL, std::llround(ratio));
    };
    auto slab_count = [&](int j, int s, long long cap) {
        const int lj = lj_index(profile, j);
        if (lj + s > 40) return cap + 1;
        const long long zc = 1LL << (lj + s);
        if (zc > cap) return cap + 1;
        const double du = 1.0 / static_cast<double>(zc);
        long long total = 0;
        for (long long i = 0; i < zc && total <= cap; ++i) total += ysplit(j, i * du, du);
        return total;
    };

    const long long cap = 4 * nTarget;
    int bestJ = 0, bestS = 0;
    double bestScore = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 12; ++s) {
        long long count = 1; // tail
        for (int J = 2; J <= Jcap; ++J) {
            count += slab_count(J, s, cap);
            if (count > cap) break;
            if (4 * count < nTarget) continue;
            const double score = std::abs(std::log(static_cast<double>(count) / nTarget));
            if (score < bestScore - 1e-12 || (std::abs(score - bestScore) <= 1e-12 && J > bestJ)) {
                bestScore = score;
                bestJ = J;
                bestS = s;
            }
        }
    }
    if (bestJ == 0) throw std::invalid_argument("no near-square mesh with cell count in [nTarget/4, 4 nTarget]");

    CuspMesh mesh;
    mesh.profile = profile;
    for (int j = 2; j <= bestJ; ++j) {
        const long long zc = 1LL << (lj_index(profile, j) + bestS);
        const double du = 1.0 / static_cast<double>(zc);
        for (long long i = 0; i < zc; ++i) {
            const double u0 = i * du, u1 = i + 1 == zc ? 1.0 : (i + 1) * du;
            const long long k = ysplit(j, u0, du);
            for (long long b = 0; b < k; ++b) {
                const double e0 = -1.0 + 2.0 * b / k, e1 = b + 1 == k ? 1.0 : -1.0 + 2.0 * (b + 1) / k;
                mesh.cells.push_back({j, u0, u1, e0, e1});
            }
        }
    }
    mesh.tailExponent = bestJ;
    return mesh;
}

CuspMesh build_schedule_mesh(const CuspProfile& profile, const PartitionSchedule& schedule) {
    require_shape(profile);
    const int Nd = schedule.Nd();
    if (Nd < 1 || Nd > 16) throw std::invalid_argument("schedule mesh requires 1 <= Nd <= 16");
    CuspMesh mesh;
    mesh.profile = profile;
    int lastSlab = 1;
    for (int t = 0; t <= Nd; ++t) {
        const int l = schedule.l_mt(schedule.m_star(t), t);
        if (l > 30) throw std::invalid_argument("schedule level above 30");
        for (long long jj = std::max(2LL, 1LL << t); jj < (2LL << t); ++jj) {
            const int j = static_cast<int>(jj);
            lastSlab = j;
            const int lj = lj_index(profile, j);
            if (l <= lj) {
                const long long cells = 1LL << l;
                for (long long i = 0; i < cells; ++i)
                    mesh.cells.push_back({j, std::ldexp(static_cast<double>(i), -l),
                                          i + 1 == cells ? 1.0 : std::ldexp(static_cast<double>(i + 1), -l), -1.0, 1.0});
                continue;
            }
            const int e = l - lj;
            const int ez = lj + (e + 1) / 2;
            const long long zc = 1LL << ez, ky = 1LL << (e / 2);
            for (long long i = 0; i < zc; ++i) {
                const double u0 = std::ldexp(static_cast<double>(i), -ez);
                const double u1 = i + 1 == zc ? 1.0 : std::ldexp(static_cast<double>(i + 1), -ez);
                for (long long b = 0; b < ky; ++b)
                    mesh.cells.push_back({j, u0, u1, -1.0 + 2.0 * b / ky, b + 1 == ky ? 1.0 : -1.0 + 2.0 * (b + 1) / ky});
            }
        }
    }
    mesh.tailExponent = lastSlab;
    return mesh;
}

MeshAudit audit_mesh(const CuspMesh& mesh) {
    MeshAudit audit;
    std::map<int, std::vector<const MeshCell*>> bySlab;
    audit.minAspect = std::numeric_limits<double>::infinity();
    audit.maxAspect = 0.0;
    for (const auto& c : mesh.cells) {
        bySlab[c.slab].push_back(&c);
        const double a = cell_aspect(mesh.profile, c);
        audit.minAspect = std::min(audit.minAspect, a);
        audit.maxAspect = std::max(audit.maxAspect, a);
    }
    if (bySlab.empty()) return audit;
    double covered = 0.0;
    for (auto& [slab, cells] : bySlab) {
        std::sort(cells.begin(), cells.end(), [](const MeshCell* a, const MeshCell* b) { return a->u0 < b->u0; });
        for (size_t i = 0; i < cells.size(); ++i) {
            covered += (cells[i]->u1 - cells[i]->u0) * (cells[i]->eta1 - cells[i]->eta0);
            for (size_t k = i + 1; k < cells.size() && cells[k]->u0 < cells[i]->u1; ++k) {
                const double eo = std::min(cells[i]->eta1, cells[k]->eta1) - std::max(cells[i]->eta0, cells[k]->eta0);
                const double uo = std::min(cells[i]->u1, cells[k]->u1) - std::max(cells[i]->u0, cells[k]->u0);
                if (eo > 0.0 && uo > 0.0) ++audit.overlaps;
            }
        }
    }
    const int lo = bySlab.begin()->first, hi = bySlab.rbegin()->first;
    audit.coverageDefect = std::max(0.0, 1.0 - covered / (2.0 * (hi - lo + 1)));
    return audit;
}

CellNodes cell_nodes(const CuspProfile& profile, const MeshCell& cell, int order) {
    const GaussRule& gl = gauss_legendre(order);
    CellNodes nodes;
    nodes.logPhiRef = log_phi_at_slab(profile, cell.slab);
    nodes.logScale = nodes.logPhiRef - cell.slab * kLn2;
    const double hu = 0.5 * (cell.u1 - cell.u0), he = 0.5 * (cell.eta1 - cell.eta0);
    const size_t m = gl.nodes.size();
    nodes.U.reserve(m * m);
    for (size_t a = 0; a < m; ++a) {
        const double U = cell.u0 + hu * (gl.nodes[a] + 1.0);
        const double lz = -cell.slab * kLn2 + std::log1p(U);
        const double R = std::exp(profile.log_at_log(lz) - nodes.logPhiRef);
        for (size_t b = 0; b < m; ++b) {
            const double eta = cell.eta0 + he * (gl.nodes[b] + 1.0);
            nodes.U.push_back(U);
            nodes.Y.push_back(eta * R);
            nodes.w.push_back(gl.weights[a] * gl.weights[b] * hu * he * R);
            nodes.logZ.push_back(lz);
        }
    }
    return nodes;
}

std::vector<std::pair<int, int>> monomials(int r) {
    std::vector<std::pair<int, int>> out;
    for (int deg = 0; deg < r; ++deg)
        for (int a = deg; a >= 0; --a) out.emplace_back(a, deg - a);
    return out;
}

namespace {

double scaled_monomial(const LocalFit& fit, std::pair<int, int> ab, double U, double Y) {
    return std::pow((U - fit.uc) / fit.us, ab.first) * std::pow((Y - fit.yc) / fit.ys, ab.second);
}

} // namespace

LocalFit fit_local(const CellNodes& nodes, const std::vector<double>& values, int r, std::size_t cellIndex) {
    const auto mono = monomials(r);
    const size_t n = nodes.U.size();
    LocalFit fit;
    double wsum = 0.0, umin = nodes.U[0], umax = nodes.U[0];
    for (size_t i = 0; i < n; ++i) {
        wsum += nodes.w[i];
        fit.uc += nodes.w[i] * nodes.U[i];
        fit.yc += nodes.w[i] * nodes.Y[i];
        umin = std::min(umin, nodes.U[i]);
        umax = std::max(umax, nodes.U[i]);
    }
    if (!(wsum > 0.0)) throw std::runtime_error("ill-conditioned local basis in cell " + std::to_string(cellIndex));
    fit.uc /= wsum;
    fit.yc /= wsum;
    fit.us = 0.5 * (umax - umin);
    fit.ys = 0.0;
    for (size_t i = 0; i < n; ++i) fit.ys = std::max(fit.ys, std::abs(nodes.Y[i] - fit.yc));
    if (!(fit.us > 0.0) || !(fit.ys > 0.0))
        throw std::runtime_error("ill-conditioned local basis in cell " + std::to_string(cellIndex));

    Eigen::MatrixXd A(n, mono.size());
    Eigen::VectorXd b(n);
    for (size_t i = 0; i < n; ++i) {
        const double sw = std::sqrt(nodes.w[i]);
        for (size_t k = 0; k < mono.size(); ++k) A(i, k) = sw * scaled_monomial(fit, mono[k], nodes.U[i], nodes.Y[i]);
        b[i] = sw * values[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const auto& R = qr.matrixR();
    const Eigen::Index m = static_cast<Eigen::Index>(mono.size());
    if (qr.rank() < m || std::abs(R(m - 1, m - 1)) < 1e-12 * std::abs(R(0, 0)))
        throw std::runtime_error("ill-conditioned local basis in cell " + std::to_string(cellIndex));
    fit.coef = qr.solve(b);
    return fit;
}

double eval_local(const LocalFit& fit, int r, double U, double Y) {
    const auto mono = monomials(r);
    double s = 0.0;
    for (size_t k = 0; k < mono.size(); ++k) s += fit.coef[static_cast<Eigen::Index>(k)] * scaled_monomial(fit, mono[k], U, Y);
    return s;
}

double PiecewisePoly::evaluate(const CuspMesh& mesh, std::size_t cell, double y, double z) const {
    const MeshCell& c = mesh.cells.at(cell);
    const double U = std::ldexp(z, c.slab) - 1.0;
    const double Y = y / std::exp(log_phi_at_slab(mesh.profile, c.slab));
    return eval_local(fits.at(cell), r, U, Y);
}

namespace {

std::vector<double> physical_values(const CellNodes& nodes, int slab, const PlaneFn& f) {
    std::vector<double> vals(nodes.U.size());
    const double phiRef = std::exp(nodes.logPhiRef);
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = f(phiRef * nodes.Y[i], std::ldexp(1.0 + nodes.U[i], -slab));
    return vals;
}

} // namespace

PiecewisePoly project_local_poly(const CuspMesh& mesh, const PlaneFn& f, int r) {
    if (r < 1 || r > 4) throw std::invalid_argument("project_local_poly requires 1 <= r <= 4");
    PiecewisePoly poly;
    poly.r = r;
    poly.fits.resize(mesh.cells.size());
    parallel_for(mesh.cells.size(), [&](size_t k) {
        const CellNodes nodes = cell_nodes(mesh.profile, mesh.cells[k], mesh.quadOrder);
        poly.fits[k] = fit_local(nodes, physical_values(nodes, mesh.cells[k].slab, f), r, k);
    });
    return poly;
}

double weighted_norm(const CuspMesh& mesh, const PlaneFn& f, double q, const WeightSpec& v) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must be finite and >= 1");
    std::vector<double> part(mesh.cells.size(), 0.0);
    parallel_for(mesh.cells.size(), [&](size_t k) {
        const CellNodes nodes = cell_nodes(mesh.profile, mesh.cells[k], mesh.quadOrder);
        const auto vals = physical_values(nodes, mesh.cells[k].slab, f);
        double s = 0.0;
        for (size_t i = 0; i < vals.size(); ++i)
            s += nodes.w[i] * std::pow(std::abs(vals[i]), q) * std::exp(q * v.log_at_log(nodes.logZ[i]) + nodes.logScale);
        part[k] = s;
    });
    double total = 0.0;
    for (double s : part) total += s;
    if (mesh.tailExponent > 0) {
        const GaussRule& gl = gauss_legendre(mesh.quadOrder);
        auto section = [&](double z) {
            if (!(z > 0.0)) return 0.0;
            const double phi = mesh.profile(z);
            double s = 0.0;
            for (size_t b = 0; b < gl.nodes.size(); ++b) s += gl.weights[b] * std::pow(std::abs(f(gl.nodes[b] * phi, z)), q);
            return s * phi * std::pow(v(z), q);
        };
        total += integrate_graded(section, 0.0, std::ldexp(1.0, -mesh.tailExponent), 1e-10, 1, GradeEnds::Left).value;
    }
    return std::pow(total, 1.0 / q);
}

double projection_error(const CuspMesh& mesh, const PlaneFn& f, const PiecewisePoly& poly, double q,
                        const WeightSpec& v) {
    if (poly.fits.size() != mesh.cells.size()) throw std::invalid_argument("approximant does not match the mesh");
    std::vector<double> part(mesh.cells.size(), 0.0);
    parallel_for(mesh.cells.size(), [&](size_t k) {
        const CellNodes nodes = cell_nodes(mesh.profile, mesh.cells[k], mesh.quadOrder);
        const auto vals = physical_values(nodes, mesh.cells[k].slab, f);
        double s = 0.0;
        for (size_t i = 0; i < vals.size(); ++i) {
            const double res = vals[i] - eval_local(poly.fits[k], poly.r, nodes.U[i], nodes.Y[i]);
            s += nodes.w[i] * std::pow(std::abs(res), q) * std::exp(q * v.log_at_log(nodes.logZ[i]) + nodes.logScale);
        }
        part[k] = s;
    });
    double total = 0.0;
    for (double s : part) total += s;
    return std::pow(total, 1.0 / q);
}

} // namespace peakwidths
