#include "peakwidths/ball_widths.hpp"
#include "peakwidths/exponents.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace peakwidths;

namespace {

BallWidthProblem ball(int nu, int n, double p, double q, BallWidthKind kind = BallWidthKind::Kolmogorov) {
    BallWidthProblem b;
    b.nu = nu;
    b.n = n;
    b.p = p;
    b.q = q;
    b.kind = kind;
    return b;
}

BallWidthOptions quick(std::uint64_t seed = 0) {
    BallWidthOptions o;
    o.restarts = 16;
    o.seed = seed;
    return o;
}

} // namespace

TEST_CASE("l_q distance to a subspace") {
    Eigen::MatrixXd B(3, 1);
    B << 1, 1, 1;
    Eigen::VectorXd x(3);
    x << 1, 2, 4;
    // l1: median shift t = 2 leaves |1-2| + 0 + |4-2| = 3
    CHECK(lq_distance(x, B, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
    // l2: mean shift 7/3
    const double m = 7.0 / 3.0;
    CHECK(lq_distance(x, B, 2.0) ==
          doctest::Approx(std::sqrt((1 - m) * (1 - m) + (2 - m) * (2 - m) + (4 - m) * (4 - m))).epsilon(1e-12));
    // l4 via a scan over the shift
    double best = 1e300;
    for (int i = 0; i <= 400000; ++i) {
        const double t = 1.0 + 3.0 * i / 400000.0;
        best = std::min(best, std::pow(std::pow(std::abs(1 - t), 4) + std::pow(std::abs(2 - t), 4) + std::pow(std::abs(4 - t), 4), 0.25));
    }
    CHECK(lq_distance(x, B, 4.0) == doctest::Approx(best).epsilon(1e-9));
    CHECK(lq_distance(x, Eigen::MatrixXd(3, 0), 2.0) == doctest::Approx(x.norm()));
}

TEST_CASE("Euclidean ball widths are exactly one") {
    for (int nu = 2; nu <= 5; ++nu) {
        for (int n = 1; n < nu; ++n) {
            const auto k = kolmogorov_width_est(ball(nu, n, 2, 2), quick());
            CHECK(k.estimateUpper == doctest::Approx(1.0).epsilon(1e-9));
            const auto g = gelfand_width_est(ball(nu, n, 2, 2, BallWidthKind::Gelfand), quick());
            CHECK(g.estimateUpper == doctest::Approx(1.0).epsilon(1e-9));
        }
        CHECK(kolmogorov_width_est(ball(nu, nu, 2, 1), quick()).estimateUpper == 0.0);
        CHECK(gelfand_width_est(ball(nu, nu, 1.5, 3, BallWidthKind::Gelfand), quick()).estimateUpper == 0.0);
    }
}

TEST_CASE("zeroth widths are norm-comparison constants") {
    for (int nu : {2, 4, 6}) {
        for (auto [p, q] : std::vector<std::pair<double, double>>{{2, 1}, {1.5, 3}, {4, 2}, {2, 4}}) {
            const double expect = std::pow(nu, std::max(0.0, 1 / q - 1 / p));
            const auto g = gelfand_width_est(ball(nu, 0, p, q, BallWidthKind::Gelfand), quick());
            CHECK(g.estimateUpper == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("p = 2, q = 1 line width against the brute-force oracle") {
    // Brute force over 6000 lines and 40000 sphere points (tests/oracles/derive_values.py).
    const double oracle = 1.4141676237011669;
    const auto est = kolmogorov_width_est(ball(3, 1, 2, 1));
    CHECK(std::abs(est.estimateUpper - oracle) <= 1e-2);
    CHECK(est.innerSup <= est.estimateUpper);
    CHECK(est.basis.rows() == 3);
    CHECK(est.basis.cols() == 1);
}

TEST_CASE("Kolmogorov estimates are nonincreasing in n") {
    double prev = 1e300;
    for (int n = 0; n <= 4; ++n) {
        const double v = kolmogorov_width_est(ball(4, n, 2, 1), quick()).estimateUpper;
        CHECK(v <= prev);
        CHECK(v == doctest::Approx(std::sqrt(4.0 - n)).epsilon(2e-2));
        prev = v;
    }
    for (int n = 1; n <= 3; ++n) CHECK(kolmogorov_width_est(ball(4, n, 2, 4), quick()).estimateUpper <= 1.0);
}

TEST_CASE("Gelfand estimates track the dual Gluskin order with a stable constant") {
    std::vector<double> ratio;
    for (int nu = 3; nu <= 5; ++nu) {
        const auto g = gelfand_width_est(ball(nu, 1, 2, 4, BallWidthKind::Gelfand), quick());
        ratio.push_back(g.estimateUpper / gelfand_order(1, nu, 2, 4));
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*hi / *lo <= 1.5);
}

TEST_CASE("fixed seed reproduces estimates bit for bit") {
    const auto a = kolmogorov_width_est(ball(4, 2, 1.5, 3), quick(42));
    const auto b = kolmogorov_width_est(ball(4, 2, 1.5, 3), quick(42));
    CHECK(a.estimateUpper == b.estimateUpper);
    CHECK(a.innerSup == b.innerSup);
    CHECK(a.basis == b.basis);
    const auto c = gelfand_width_est(ball(4, 1, 2, 4, BallWidthKind::Gelfand), quick(9));
    const auto d = gelfand_width_est(ball(4, 1, 2, 4, BallWidthKind::Gelfand), quick(9));
    CHECK(c.estimateUpper == d.estimateUpper);
    CHECK(split_seed(1, 2) == split_seed(1, 2));
    CHECK(split_seed(1, 2) != split_seed(1, 3));
}

TEST_CASE("problem validation") {
    CHECK_THROWS_AS(ball(7, 1, 2, 2).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ball(3, 4, 2, 2).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ball(3, 1, 0.5, 2).validate(), std::invalid_argument);
    CHECK_THROWS_AS((void)kolmogorov_width_est(ball(3, 1, 2, 2, BallWidthKind::Gelfand)), std::invalid_argument);
}
