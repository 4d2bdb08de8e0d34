#include "fixtures.hpp"
#include "peakwidths/cusp_mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace peakwidths;
using namespace fixtures;

namespace {

PartitionSchedule schedule(int N, double eps = 0.5, int tStar = 0) {
    PartitionSchedule s;
    s.N = N;
    s.d = 2;
    s.eps = eps;
    s.tStar = tStar;
    return s;
}

CuspMesh one_cell_mesh() {
    CuspMesh m;
    m.profile = power_cusp(2.0);
    m.cells = {{2, 0.0, 1.0, -1.0, 1.0}};
    return m;
}

// Each cell split into two halves in u and in eta.
CuspMesh quarter(const CuspMesh& m) {
    CuspMesh out = m;
    out.cells.clear();
    for (const auto& c : m.cells) {
        const double um = 0.5 * (c.u0 + c.u1), em = 0.5 * (c.eta0 + c.eta1);
        out.cells.push_back({c.slab, c.u0, um, c.eta0, em});
        out.cells.push_back({c.slab, um, c.u1, c.eta0, em});
        out.cells.push_back({c.slab, c.u0, um, em, c.eta1});
        out.cells.push_back({c.slab, um, c.u1, em, c.eta1});
    }
    return out;
}

const WeightSpec kUnit = weight(0.0);

} // namespace

TEST_CASE("near-square mesh on the quadratic cusp") {
    const auto mesh = build_mesh(power_cusp(2.0), schedule(3), 64);
    CHECK(mesh.cell_count() >= 16);
    CHECK(mesh.cell_count() <= 256);
    const auto audit = audit_mesh(mesh);
    CHECK(audit.overlaps == 0);
    CHECK(audit.coverageDefect < 1e-3);
    CHECK(audit.minAspect >= 1.0 / 8.0);
    CHECK(audit.maxAspect <= 8.0);

    for (long long target : {16LL, 100LL, 400LL, 2000LL}) {
        const auto m = build_mesh(power_cusp(1.5), schedule(4), target);
        CHECK(4 * static_cast<long long>(m.cell_count()) >= target);
        CHECK(static_cast<long long>(m.cell_count()) <= 4 * target);
        const auto a = audit_mesh(m);
        CHECK(a.overlaps == 0);
        CHECK(a.minAspect >= 1.0 / 8.0);
        CHECK(a.maxAspect <= 8.0);
    }
    CHECK_THROWS_AS((void)build_mesh(power_cusp(2.0), schedule(3), 8), std::invalid_argument);
    CHECK_THROWS_AS((void)build_mesh(power_cusp(1.0), schedule(3), 64), std::invalid_argument);
}

TEST_CASE("schedule mesh tiles every slab") {
    const auto mesh = build_schedule_mesh(power_cusp(2.0), schedule(2, 1.5, 0));
    const auto audit = audit_mesh(mesh);
    CHECK(audit.overlaps == 0);
    CHECK(audit.coverageDefect < 1e-12);
    CHECK(mesh.tailExponent == 31);
    CHECK(mesh.cell_count() > 16);
}

TEST_CASE("weighted norm of the constant is the cusp area") {
    const auto mesh = build_mesh(power_cusp(2.0), schedule(3), 64);
    const PlaneFn one = [](double, double) { return 1.0; };
    CHECK(weighted_norm(mesh, one, 1.0, kUnit) == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
    CHECK(weighted_norm(mesh, [](double, double) { return 0.0; }, 2.0, kUnit) == 0.0);

    const PlaneFn f = [](double y, double z) { return std::cos(3 * y + 5 * z) + z; };
    const WeightSpec v = weight(0.5, 0.0);
    const double a = weighted_norm(mesh, f, 2.0, v);
    const double b = weighted_norm(mesh, [&](double y, double z) { return -2.5 * f(y, z); }, 2.0, v);
    CHECK(b == doctest::Approx(2.5 * a).epsilon(1e-14));

    const auto finer = build_mesh(power_cusp(2.0), schedule(3), 256);
    CHECK(weighted_norm(finer, f, 2.0, v) == doctest::Approx(a).epsilon(1e-6));
    CHECK(weighted_norm(quarter(mesh), f, 2.0, v) == doctest::Approx(a).epsilon(1e-6));
}

TEST_CASE("local projection reproduces polynomials of degree below r") {
    const auto mesh = build_schedule_mesh(power_cusp(2.0), schedule(2, 1.5, 0));
    const PlaneFn one = [](double, double) { return 1.0; };
    const PlaneFn lin = [](double y, double z) { return 3 * z - 2 * y + 0.5; };
    const PlaneFn quad = [](double y, double z) { return z * z - 4 * y * z + y * y + z; };
    CHECK(projection_error(mesh, one, project_local_poly(mesh, one, 1), 2.0, kUnit) <= 1e-10 * weighted_norm(mesh, one, 2.0, kUnit));
    CHECK(projection_error(mesh, lin, project_local_poly(mesh, lin, 2), 2.0, kUnit) <= 1e-10 * weighted_norm(mesh, lin, 2.0, kUnit));
    CHECK(projection_error(mesh, quad, project_local_poly(mesh, quad, 3), 2.0, kUnit) <= 1e-10 * weighted_norm(mesh, quad, 2.0, kUnit));

    const auto poly = project_local_poly(mesh, lin, 2);
    for (std::size_t k = 0; k < mesh.cells.size(); k += 7) {
        const auto& c = mesh.cells[k];
        const double z = std::ldexp(1.0 + 0.5 * (c.u0 + c.u1), -c.slab);
        const double y = 0.5 * (c.eta0 + c.eta1) * mesh.profile(z);
        CHECK(poly.evaluate(mesh, k, y, z) == doctest::Approx(lin(y, z)).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)project_local_poly(mesh, one, 5), std::invalid_argument);
}

TEST_CASE("affine residual of z^2 on one cell against a dense oracle") {
    const auto mesh = one_cell_mesh();
    const PlaneFn f = [](double, double z) { return z * z; };
    const double err = projection_error(mesh, f, project_local_poly(mesh, f, 2), 2.0, kUnit);
    CHECK(err == doctest::Approx(0.0011962630125268906).epsilon(1e-9));
}

TEST_CASE("projection is linear and idempotent") {
    const auto mesh = build_mesh(power_cusp(2.0), schedule(3), 64);
    const PlaneFn f = [](double y, double z) { return std::sin(7 * z) * std::exp(y); };
    const PlaneFn g = [](double y, double z) { return std::cos(11 * y * z); };
    const int r = 3;
    const auto pf = project_local_poly(mesh, f, r);
    const auto pg = project_local_poly(mesh, g, r);
    const auto ph = project_local_poly(mesh, [&](double y, double z) { return 2 * f(y, z) - 3 * g(y, z); }, r);
    for (std::size_t k = 0; k < mesh.cells.size(); ++k)
        for (Eigen::Index i = 0; i < ph.fits[k].coef.size(); ++i)
            CHECK(ph.fits[k].coef[i] == doctest::Approx(2 * pf.fits[k].coef[i] - 3 * pg.fits[k].coef[i]).epsilon(1e-9));

    for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
        const auto nodes = cell_nodes(mesh.profile, mesh.cells[k], mesh.quadOrder);
        std::vector<double> vals(nodes.U.size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = eval_local(pf.fits[k], r, nodes.U[i], nodes.Y[i]);
        const auto again = fit_local(nodes, vals, r, k);
        for (Eigen::Index i = 0; i < again.coef.size(); ++i)
            CHECK(again.coef[i] == doctest::Approx(pf.fits[k].coef[i]).epsilon(1e-9));
    }
}

TEST_CASE("projection error is nonincreasing under nested refinement") {
    auto mesh = build_mesh(power_cusp(2.0), schedule(3), 32);
    const PlaneFn f = [](double y, double z) { return std::cos(40 * z + 100 * y); };
    for (int r = 1; r <= 3; ++r) {
        double prev = 1e300;
        CuspMesh m = mesh;
        for (int level = 0; level < 3; ++level) {
            const double e = projection_error(m, f, project_local_poly(m, f, r), 2.0, kUnit);
            CHECK(e <= prev * (1 + 1e-10));
            prev = e;
            m = quarter(m);
        }
    }
}

TEST_CASE("degenerate local bases are rejected by cell") {
    CellNodes nodes;
    nodes.U = {0.5, 0.5, 0.5};
    nodes.Y = {0.1, 0.1, 0.1};
    nodes.w = {1, 1, 1};
    CHECK_THROWS_WITH_AS((void)fit_local(nodes, {1, 2, 3}, 2, 17), "ill-conditioned local basis in cell 17", std::runtime_error);
}

TEST_CASE("cell geometry") {
    CHECK(monomials(3).size() == 6);
    const MeshCell c{3, 0.0, 1.0, -1.0, 1.0};
    // z-extent 1/8, y-extent 2 phi(3/16) = 2 * 9/256
    CHECK(cell_aspect(power_cusp(2.0), c) == doctest::Approx(0.125 / (2.0 * 9.0 / 256.0)).epsilon(1e-12));
    const auto nodes = cell_nodes(power_cusp(2.0), c, 8);
    double area = 0.0;
    for (double w : nodes.w) area += w;
    // int_{1/8}^{1/4} 2 z^2 dz = (2/3)(1/64 - 1/512)
    CHECK(area * std::exp(nodes.logScale) == doctest::Approx(2.0 / 3.0 * (1.0 / 64 - 1.0 / 512)).epsilon(1e-13));
}
