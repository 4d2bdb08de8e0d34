#pragma once

#include "peakwidths/core_params.hpp"

#include <array>
#include <string>

namespace peakwidths {

/// Predicted width order n^{-thetaStar} rho(n^{sigmaStar}), or an uncovered verdict.
struct WidthPrediction {
    bool covered = false;
    std::string regime;  // "case1", "case2-j1".."case2-j4", "boundary-uncovered"
    double thetaStar = 0.0;
    double sigmaStar = 0.0;
    int jStar = 0;       // 1..4 in case 2, 0 otherwise
    std::array<double, 4> theta{};
    std::array<double, 4> sigma{};
    bool hasThetas = false; // theta/sigma arrays are meaningful (case 2 inputs)
    std::string note;
};

inline constexpr double kTieTolerance = 1e-10;

/// True when a and b agree to the relative tie tolerance.
[[nodiscard]] bool exponent_tie(double a, double b);

[[nodiscard]] WidthPrediction theorem2_exponent(const DerivedQuantities& dq, const ProblemParams& params);

struct CubeExponent {
    bool covered = false;
    double theta = 0.0;
    int branch = 0;
    std::string note;
};

/// Width exponent of W^r_p on the unit cube in L_q. Accepts 1 <= p, q <= inf and d >= 1.
/// Throws std::invalid_argument("embedding exponent nonpositive") when r/d + 1/q - 1/p <= 0.
[[nodiscard]] CubeExponent theoremD_exponent(double p, double q, int r, int d, WidthKind kind);

/// Gluskin's order function; requires 1 < p < q < inf and 0 <= n <= nu.
[[nodiscard]] double gluskin_phi(double n, double nu, double p, double q);
[[nodiscard]] double gluskin_psi(double n, double nu, double p, double q);
[[nodiscard]] double gelfand_order(double n, double nu, double p, double q);

} // namespace peakwidths
