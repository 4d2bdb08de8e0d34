#include "fixtures.hpp"
#include "peakwidths/hardy.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace peakwidths;
using namespace fixtures;

namespace {

KernelSpec unit_kernel(int r, double t1 = 1.0) {
    KernelSpec k;
    k.r = r;
    k.u = [](double) { return 1.0; };
    k.w = [](double) { return 1.0; };
    k.t1 = t1;
    return k;
}

} // namespace

TEST_CASE("closed-form B constants") {
    const auto r1 = stepanov_B(unit_kernel(1));
    CHECK(r1.c0 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r1.c1 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r1.argmax0 == doctest::Approx(0.5).epsilon(1e-5));

    const auto r2 = stepanov_B(unit_kernel(2));
    CHECK(r2.c0 == doctest::Approx(0.1875).epsilon(1e-9));
    CHECK(r2.argmax0 == doctest::Approx(0.75).epsilon(1e-5));
    CHECK(r2.c1 == doctest::Approx(0.1875).epsilon(1e-9)); // mirror image of B0

    const auto scaled = stepanov_B(unit_kernel(1, 3.0));
    CHECK(scaled.c0 == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("closed-form A0 on the quadratic cusp") {
    Set1 s;
    EmbeddingWindow win{0.0, 0.5, 0.5};
    const auto r = embedding_A(win, weight(0), weight(0), power_cusp(2.0), problem(2, 2, 1));
    CHECK(r.c0 == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
    CHECK(r.argmax0 == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    CHECK_FALSE(r.infinite);

    EmbeddingWindow empty{0.25, 0.25, 0.5};
    const auto e = embedding_A(empty, weight(0), weight(0), power_cusp(2.0), problem(2, 2, 1));
    CHECK(e.value() == 0.0);
}

TEST_CASE("A is infinite when the v-integral diverges at the peak") {
    // sigma(d-1)+1 - beta_v q = 3 - 2 * 2 < 0
    EmbeddingWindow win{0.0, 0.5, 0.5};
    const auto r = embedding_A(win, weight(0), weight(2.0), power_cusp(2.0), problem(2, 2, 1));
    CHECK(r.infinite);
}

TEST_CASE("A is homogeneous in g and v") {
    Set1 s;
    const EmbeddingWindow win{0.0, 0.125, 0.5};
    const auto base = embedding_A(win, s.g, s.v, s.cusp, s.params);
    auto g = s.g;
    g.sv.scale = 2.5;
    auto v = s.v;
    v.sv.scale = 0.2;
    const auto sg = embedding_A(win, g, s.v, s.cusp, s.params);
    const auto sv = embedding_A(win, s.g, v, s.cusp, s.params);
    CHECK(sg.c0 == doctest::Approx(2.5 * base.c0).epsilon(1e-10));
    CHECK(sg.c1 == doctest::Approx(2.5 * base.c1).epsilon(1e-10));
    CHECK(sv.c0 == doctest::Approx(0.2 * base.c0).epsilon(1e-10));
    CHECK(sv.c1 == doctest::Approx(0.2 * base.c1).epsilon(1e-10));
}

TEST_CASE("A is monotone in the window") {
    Set1 s;
    double prev = 0.0;
    for (double tp : {1.0 / 64, 1.0 / 16, 1.0 / 8, 1.0 / 4}) {
        const auto r = embedding_A({0.0, tp, 0.5}, s.g, s.v, s.cusp, s.params);
        CHECK(r.value() >= prev * (1 - 1e-9));
        prev = r.value();
    }
    double prevLeft = 1e300;
    for (double tm : {0.0, 1.0 / 256, 1.0 / 64, 1.0 / 16}) {
        const auto r = embedding_A({tm, 0.25, 0.5}, s.g, s.v, s.cusp, s.params);
        CHECK(r.value() <= prevLeft * (1 + 1e-9));
        prevLeft = r.value();
    }
}

TEST_CASE("embedding_A equals stepanov_B on the reduced kernel with roles swapped") {
    Set1 s;
    const auto a = embedding_A({0.0, 0.25, 0.5}, s.g, s.v, s.cusp, s.params);
    const auto b = stepanov_B(embedding_kernel(s.g, s.v, s.cusp, s.params, 0.0, 0.25));
    CHECK(a.c0 == doctest::Approx(b.c1).epsilon(1e-12));
    CHECK(a.c1 == doctest::Approx(b.c0).epsilon(1e-12));
}

TEST_CASE("quadrature refinement audit") {
    Set1 s;
    const auto r = embedding_A({0.0, 0.25, 0.5}, s.g, s.v, s.cusp, s.params, 1e-10, 1);
    const auto f = embedding_A({0.0, 0.25, 0.5}, s.g, s.v, s.cusp, s.params, 1e-10, 3);
    CHECK(r.value() == doctest::Approx(f.value()).epsilon(1e-8));
    CHECK(r.quadError < 1e-6 * r.value());
}

TEST_CASE("discretized operator norm") {
    KernelSpec zero = unit_kernel(1);
    zero.u = [](double) { return 0.0; };
    CHECK(discretized_operator_norm(zero, 64) == 0.0);

    const double n = discretized_operator_norm(unit_kernel(1), 512);
    CHECK(n >= 0.5);
    CHECK(n <= 1.0);
    CHECK(n == doctest::Approx(2.0 / M_PI).epsilon(1e-2)); // norm of the Volterra operator on L2[0,1]

    KernelSpec disjoint = unit_kernel(1);
    disjoint.u = [](double s) { return s < 0.5 ? 1.0 : 0.0; };
    disjoint.w = [](double t) { return t > 0.5 ? 1.0 : 0.0; };
    CHECK(discretized_operator_norm(disjoint, 128) <= 1e-14);

    KernelSpec pq = unit_kernel(1);
    pq.q = 4.0;
    const auto b = stepanov_B(pq);
    const double est = discretized_operator_norm(pq, 256, 7);
    CHECK(est >= 0.2 * b.value());
    CHECK(est <= 4.0 * (b.c0 + b.c1));
    CHECK(est == discretized_operator_norm(pq, 256, 7));
}

TEST_CASE("asymptotic A flatness on set1") {
    Set1 s;
    const auto rep = asymptotic_A_check(s.g, s.v, s.cusp, s.params, log_grid(std::ldexp(1.0, -16), 0.25, 9));
    CHECK(rep.finite);
    CHECK(rep.maxOverMin <= 3.0);

    // A scales with a constant factor of g, and so does rho, which carries the constant part of
    // the slowly varying factor: the ratio is unchanged.
    auto g = s.g;
    g.sv.scale = 4.0;
    const auto scaled = asymptotic_A_check(g, s.v, s.cusp, s.params, rep.tau);
    for (std::size_t i = 0; i < rep.ratio.size(); ++i) {
        CHECK(scaled.A[i] == doctest::Approx(4.0 * rep.A[i]).epsilon(1e-10));
        CHECK(scaled.ratio[i] == doctest::Approx(rep.ratio[i]).epsilon(1e-10));
    }

    const auto one = asymptotic_A_check(s.g, s.v, s.cusp, s.params, {0.01});
    CHECK(one.maxOverMin == 1.0);
}

TEST_CASE("log grid") {
    const auto g = log_grid(1e-4, 1.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(1e-4));
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(g[2] == doctest::Approx(1e-2));
}
