#pragma once

#include "peakwidths/core_params.hpp"
#include "peakwidths/partition.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace peakwidths {

// Cells of the planar cusp {(y, z) : 0 < z <= 1/2, |y| < phi(z)} are stored in slab-local
// coordinates: slab j spans 2^-j <= z <= 2^-j+1, z = 2^-j (1 + u) with u in [0, 1], and
// y = eta * phi(z) with eta in [-1, 1]. This keeps cells meaningful far below double underflow.

struct MeshCell {
    int slab = 2;
    double u0 = 0.0;
    double u1 = 1.0;
    double eta0 = -1.0;
    double eta1 = 1.0;
};

struct CuspMesh {
    CuspProfile profile;
    std::vector<MeshCell> cells;
    /// The single unmeshed tail cell covers 0 < z <= 2^-tailExponent (0: no tail).
    int tailExponent = 0;
    int quadOrder = 8;

    [[nodiscard]] std::size_t cell_count() const { return cells.size() + (tailExponent > 0 ? 1 : 0); }
};

/// z-extent over y-extent, the latter measured at the z-midpoint.
[[nodiscard]] double cell_aspect(const CuspProfile& profile, const MeshCell& cell);

/// Near-square mesh: slabs 2..J on the grid 2^-j + i 2^{-j-l_j-s}, each z-cell split in y into
/// round(2 phi / width) pieces, then one tail cell. J <= min(14, 2^{Nd+1} - 1) and the refinement
/// s are chosen to bring the count closest to nTarget. Throws when no choice lands in
/// [nTarget/4, 4 nTarget] or when the profile fails its shape checks.
[[nodiscard]] CuspMesh build_mesh(const CuspProfile& profile, const PartitionSchedule& schedule, long long nTarget);

/// Mesh of the multiscale schedule: slabs j in [2^t, 2^{t+1}) get l = l_{m*(t),t} levels. For
/// l <= l_j these are 2^l full-width strips; otherwise each of the 2^{l_j} near-square cells is
/// split dyadically into 2^{l-l_j} pieces. Slabs run to 2^{Nd+1} - 1, then one tail cell.
[[nodiscard]] CuspMesh build_schedule_mesh(const CuspProfile& profile, const PartitionSchedule& schedule);

struct MeshAudit {
    int overlaps = 0;              // pairs of cells meeting in positive area
    double coverageDefect = 0.0;   // uncovered fraction of the meshed slabs, in (u, eta) area
    double minAspect = 0.0;
    double maxAspect = 0.0;
};

[[nodiscard]] MeshAudit audit_mesh(const CuspMesh& mesh);

/// Tensor Gauss-Legendre nodes of one cell. Physical coordinates are z = 2^-slab (1 + U) and
/// y = exp(logPhiRef) * Y; the physical measure of node i is exp(logScale) * w[i].
struct CellNodes {
    std::vector<double> U;
    std::vector<double> Y;
    std::vector<double> w;
    std::vector<double> logZ;
    double logPhiRef = 0.0; // log phi(2^-slab)
    double logScale = 0.0;  // log(phi(2^-slab) 2^-slab)
};

[[nodiscard]] CellNodes cell_nodes(const CuspProfile& profile, const MeshCell& cell, int order);

/// Orthogonal L2 projection onto polynomials of total degree <= r-1 on one cell, in the scaled
/// coordinates ((U - uc)/us, (Y - yc)/ys).
struct LocalFit {
    Eigen::VectorXd coef;
    double uc = 0.0, us = 1.0, yc = 0.0, ys = 1.0;
};

/// Monomial exponents (a, b) of U^a Y^b with a + b <= r - 1, in basis order.
[[nodiscard]] std::vector<std::pair<int, int>> monomials(int r);

/// Fits `values` at the nodes; throws std::runtime_error naming `cellIndex` for a degenerate cell.
[[nodiscard]] LocalFit fit_local(const CellNodes& nodes, const std::vector<double>& values, int r,
                                 std::size_t cellIndex);
[[nodiscard]] double eval_local(const LocalFit& fit, int r, double U, double Y);

using PlaneFn = std::function<double(double y, double z)>;

struct PiecewisePoly {
    int r = 1;
    std::vector<LocalFit> fits; // one per mesh cell

    /// Value on cell `cell` at physical (y, z).
    [[nodiscard]] double evaluate(const CuspMesh& mesh, std::size_t cell, double y, double z) const;
};

/// Per-cell projection of f (evaluated in physical coordinates). Requires 1 <= r <= 4.
[[nodiscard]] PiecewisePoly project_local_poly(const CuspMesh& mesh, const PlaneFn& f, int r);

/// ||f v||_q over the meshed cells plus the tail cell (graded quadrature in z).
[[nodiscard]] double weighted_norm(const CuspMesh& mesh, const PlaneFn& f, double q, const WeightSpec& v);

/// ||(f - P f) v||_q over the meshed cells; the tail cell is not included.
[[nodiscard]] double projection_error(const CuspMesh& mesh, const PlaneFn& f, const PiecewisePoly& poly, double q,
                                      const WeightSpec& v);

} // namespace peakwidths
