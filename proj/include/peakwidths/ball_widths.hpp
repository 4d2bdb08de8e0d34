#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace peakwidths {

enum class BallWidthKind { Kolmogorov, Gelfand };

struct BallWidthProblem {
    int nu = 3;   // ambient dimension, at most 6
    int n = 1;    // width index, 0 <= n <= nu
    double p = 2.0;
    double q = 2.0;
    BallWidthKind kind = BallWidthKind::Kolmogorov;

    void validate() const;
};

struct BallWidthOptions {
    int restarts = 64;
    int samples = 1000;   // quasi-random sphere samples in the inner maximization
    int ascentSteps = 50;
    int outerSteps = 60;  // local search moves per restart
    std::uint64_t seed = 0;
};

struct BallWidthEstimate {
    /// Inner sup for the best subspace re-audited with 4x independent samples; the value of a
    /// concrete subspace and therefore an upper estimate of the width up to sampling error.
    double estimateUpper = 0.0;
    /// Inner sup for the best subspace as seen by the search (sampled, a lower approximation).
    double innerSup = 0.0;
    /// Kolmogorov: nu x n basis of the approximating subspace. Gelfand: nu x (nu-n) kernel basis.
    Eigen::MatrixXd basis;
};

/// min over n-dimensional subspaces L of sup_{|x|_p <= 1} dist_q(x, L).
[[nodiscard]] BallWidthEstimate kolmogorov_width_est(const BallWidthProblem& prob, const BallWidthOptions& opt = {});

/// min over codimension-n subspaces K of sup{|x|_q : |x|_p <= 1, x in K}.
[[nodiscard]] BallWidthEstimate gelfand_width_est(const BallWidthProblem& prob, const BallWidthOptions& opt = {});

/// dist_q(x, span B): exact vertex enumeration for q = 1, least squares for q = 2, IRLS otherwise.
[[nodiscard]] double lq_distance(const Eigen::VectorXd& x, const Eigen::MatrixXd& B, double q);

/// Deterministic per-stream seed derived from a base seed (SplitMix64 finalizer).
[[nodiscard]] std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace peakwidths
