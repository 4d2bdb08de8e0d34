#pragma once

#include "peakwidths/core_params.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace peakwidths {

using WeightFn = std::function<double(double)>;

/// Data of the operator f -> w(t) * int_t^{t1} |s - t|^{r-1} u(s) f(s) ds on [t0, t1].
struct KernelSpec {
    int r = 1;
    WeightFn u;
    WeightFn w;
    double t0 = 0.0;
    double t1 = 1.0;
    double p = 2.0;
    double q = 2.0;

    void validate() const;
};

/// Window [tauMinus, tauPlus] of the cusp together with the vanishing-ball ratio lambda.
struct EmbeddingWindow {
    double tauMinus = 0.0;
    double tauPlus = 0.5;
    double lambda = 0.5;

    /// R = lambda * phi(tauPlus) in the model domain.
    [[nodiscard]] double radius(const CuspProfile& cusp) const;
};

/// Pair of sup-of-product constants. For stepanov_B these are (B0, B1); for embedding_A (A0, A1).
struct HardyResult {
    double c0 = 0.0;
    double c1 = 0.0;
    double argmax0 = 0.0;
    double argmax1 = 0.0;
    double quadError = 0.0;
    bool infinite = false;
    std::string note;

    [[nodiscard]] double value() const { return c0 > c1 ? c0 : c1; }
    [[nodiscard]] double argmax() const { return c0 >= c1 ? argmax0 : argmax1; }
};

/// B0 = sup_t (int_{t0}^t (t-x)^{q(r-1)} w^q)^{1/q} (int_t^{t1} u^{p'})^{1/p'},
/// B1 = sup_t (int_{t0}^t w^q)^{1/q} (int_t^{t1} (x-t)^{p'(r-1)} u^{p'})^{1/p'}.
/// `refine` > 1 subdivides every quadrature cell (used to audit quadError).
[[nodiscard]] HardyResult stepanov_B(const KernelSpec& spec, double tol = 1e-10, int refine = 1);

/// Kernel of the one-dimensional reduction on [t0, t1]: u = g phi^{-(d-1)/p}, w = v phi^{(d-1)/q}.
[[nodiscard]] KernelSpec embedding_kernel(const WeightSpec& g, const WeightSpec& v, const CuspProfile& cusp,
                                          const ProblemParams& params, double t0, double t1);

/// A0 (returned in c0) and A1 (in c1) for the window; equal to stepanov_B on
/// embedding_kernel with the roles of the two constants swapped.
[[nodiscard]] HardyResult embedding_A(const EmbeddingWindow& window, const WeightSpec& g, const WeightSpec& v,
                                      const CuspProfile& cusp, const ProblemParams& params, double tol = 1e-10,
                                      int refine = 1);

/// Norm estimate of the midpoint discretization on a geometric grid: power iteration
/// for p = q = 2, otherwise the best of 20 seeded restarts of the p->q ascent iteration.
[[nodiscard]] double discretized_operator_norm(const KernelSpec& spec, int gridSize, std::uint64_t seed = 0);

struct AFlatnessReport {
    std::vector<double> tau;
    std::vector<double> A;
    std::vector<double> argmaxT;
    std::vector<double> quadError;
    std::vector<double> ratio;
    double maxOverMin = 1.0;
    bool finite = true;
};

/// ratio(tau) = A_{[0,tau]} |log tau|^alpha / rho(|log tau|) over the grid.
[[nodiscard]] AFlatnessReport asymptotic_A_check(const WeightSpec& g, const WeightSpec& v, const CuspProfile& cusp,
                                                 const ProblemParams& params, const std::vector<double>& tauGrid,
                                                 double tol = 1e-9);

/// Log-spaced grid of `count` points between lo and hi inclusive.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, int count);

} // namespace peakwidths
