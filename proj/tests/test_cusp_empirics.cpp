#include "fixtures.hpp"
#include "peakwidths/cusp_empirics.hpp"
#include "peakwidths/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace peakwidths;
using namespace fixtures;

namespace {

// r-th derivative of (x(1-x))^{r+2} from the binomial expansion.
double bump_derivative(int r, double x) {
    const int m = r + 2;
    double s = 0.0, binom = 1.0;
    for (int k = 0; k <= m; ++k) {
        const int e = m + k;
        double fall = 1.0;
        for (int i = 0; i < r; ++i) fall *= e - i;
        s += (k % 2 ? -1.0 : 1.0) * binom * fall * std::pow(x, e - r);
        binom = binom * (m - k) / (k + 1);
    }
    return s;
}

// ||d_z^r psi_j / g||_p^p over the cusp, by plain composite Gauss-Legendre.
double seminorm_p(const TestFunctionFamily& fam, std::size_t idx, const WeightSpec& g, const CuspProfile& cusp) {
    const int j = fam.j[idx];
    const double lo = std::ldexp(1.0, -j), hi = 2 * lo;
    const double scale = std::exp(fam.logC[idx] + fam.logKappa) * std::ldexp(1.0, j * fam.r);
    auto f = [&](double z) {
        const double x = std::ldexp(z, j) - 1.0;
        const double dz = scale * bump_derivative(fam.r, x);
        return std::pow(std::abs(dz) / g(z), fam.p) * 2.0 * cusp(z);
    };
    return integrate_gl(f, lo, hi, 16, 4096);
}

template <class Fixture>
void check_normalization(const Fixture& fx, int jLo, int jHi) {
    const auto fam = bump_family(fx.params, fx.g, fx.cusp, jLo, jHi);
    REQUIRE(fam.j.size() == static_cast<std::size_t>(jHi - jLo + 1));
    double kappaCheck = 0.0;
    const double kappa = std::exp(fam.logKappa);
    kappaCheck = integrate_gl([&](double x) { return std::pow(std::abs(kappa * bump_derivative(fam.r, x)), fam.p); }, 0, 1, 16, 4096);
    CHECK(kappaCheck == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t i = 0; i < fam.j.size(); ++i) CHECK(std::abs(seminorm_p(fam, i, fx.g, fx.cusp) - 1.0) <= 1e-6);
}

} // namespace

TEST_CASE("bump normalization checked independently") {
    check_normalization(SmoothnessLimited{}, 2, 12);
    check_normalization(SingularityLimited{}, 2, 12);
    check_normalization(Set1{}, 4, 10);
}

TEST_CASE("bump profile derivatives match the expansion") {
    const auto fam = bump_family(problem(2, 2, 3), weight(0), power_cusp(2.0), 3, 3);
    const double kappa = std::exp(fam.logKappa);
    for (double x : {0.1, 0.37, 0.5, 0.93}) CHECK(fam.profile(x, 3) == doctest::Approx(kappa * bump_derivative(3, x)).epsilon(1e-12));
    CHECK(fam.profile(-0.1) == 0.0);
    CHECK(fam.profile(1.2, 2) == 0.0);
}

TEST_CASE("normalization constants follow the asymptotic formula") {
    const auto fam = bump_family(problem(2, 2, 1), weight(0), power_cusp(2.0), 4, 10);
    CHECK(fam.formulaSpread <= 2.0);
    double lo = 1e300, hi = 0;
    for (std::size_t i = 0; i < fam.j.size(); ++i) {
        const double ratio = std::exp(fam.logC[i] - fam.logCFormula[i]);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(hi / lo == doctest::Approx(fam.formulaSpread).epsilon(1e-12));
}

TEST_CASE("bump supports are disjoint") {
    const auto fam = bump_family(problem(2, 2, 1), weight(0), power_cusp(2.0), 2, 8);
    for (int j : fam.j) {
        for (int k : fam.j) {
            if (j == k) continue;
            for (int i = 1; i < 64; ++i) {
                const double z = std::ldexp(1.0 + i / 64.0, -k);
                CHECK(fam.profile(std::ldexp(z, j) - 1.0) == 0.0);
            }
        }
    }
    CHECK_THROWS_AS((void)bump_family(problem(2, 2, 1), weight(0), power_cusp(2.0), 1, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)bump_family(problem(2, 2, 1), weight(0), power_cusp(2.0), 5, 4), std::invalid_argument);
}

TEST_CASE("bump norm flatness") {
    SmoothnessLimited a;
    SingularityLimited b;
    Set1 c;
    CHECK(bump_flatness(a.params, a.g, a.v, a.cusp, 4, 10).maxOverMin <= 3.0);
    CHECK(bump_flatness(b.params, b.g, b.v, b.cusp, 4, 10).maxOverMin <= 3.0);
    CHECK(bump_flatness(c.params, c.g, c.v, c.cusp, 4, 10).maxOverMin <= 3.0);
}

TEST_CASE("decay experiment is exact on global polynomials") {
    SmoothnessLimited a;
    DecayOptions opt;
    opt.bumps = false;
    Probe constant;
    constant.name = "constant";
    constant.f = [](double, double) { return 2.0; };
    constant.derivative = [](int ky, int kz, double, double) { return ky + kz == 0 ? 2.0 : 0.0; };
    opt.probes = {constant};
    const auto rep = decay_experiment(a.params, a.g, a.v, a.cusp, {16, 64, 256}, opt);
    CHECK(rep.exact);
    CHECK(rep.verdict == "exact");
    for (double e : rep.meshedErrors) CHECK(e <= 1e-12);
}

TEST_CASE("decay experiment structure") {
    SmoothnessLimited a;
    const auto rep = decay_experiment(a.params, a.g, a.v, a.cusp, {64, 256, 1024});
    REQUIRE(rep.rows.size() == 3);
    for (std::size_t i = 1; i < rep.nValues.size(); ++i) CHECK(rep.nValues[i] > rep.nValues[i - 1]);
    CHECK(std::isfinite(rep.slope));
    CHECK(rep.predicted == doctest::Approx(-0.5));
    CHECK(rep.probeNames.size() == 3);
    for (const auto& row : rep.rows) {
        CHECK(row.probeErrors.size() == 3);
        CHECK(row.cells == static_cast<long long>(rep.nValues[&row - rep.rows.data()]));
        CHECK(row.worstError >= row.bumpWorst);
    }
}

TEST_CASE("decay experiment rejects inputs outside its contract") {
    Set1 c;
    CHECK_THROWS_WITH_AS((void)decay_experiment(c.params, c.g, c.v, c.cusp, {64, 256}),
                         "constructive scheme realizes case-1 rates only", std::invalid_argument);
    SmoothnessLimited a;
    CHECK_THROWS_AS((void)decay_experiment(a.params, a.g, a.v, a.cusp, {64, 128}), std::invalid_argument);
    CHECK_THROWS_AS((void)decay_experiment(a.params, a.g, a.v, a.cusp, {256, 64}), std::invalid_argument);
}

TEST_CASE("log-log fit") {
    const auto f = loglog_fit({1, 10, 100}, {5, 0.5, 0.05});
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-14));
    CHECK(f.rSquared == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.rmsResidual < 1e-14);
    CHECK_THROWS_AS((void)loglog_fit({1}, {1}), std::invalid_argument);
}
