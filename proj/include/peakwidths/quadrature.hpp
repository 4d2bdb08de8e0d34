#pragma once

#include <functional>
#include <vector>

namespace peakwidths {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order, computed once by Newton iteration and cached.
[[nodiscard]] const GaussRule& gauss_legendre(int order);

struct GradedIntegral {
    double value = 0.0;
    double tailEstimate = 0.0; // estimated mass beyond the last geometric cell
    bool finite = true;
    int levels = 0;            // geometric levels used (both ends combined)
};

enum class GradeEnds { Both, Left, Right };

/// Composite Gauss-Legendre(16) integration over [a, b] on geometric cells
/// [2^{-k-1}L, 2^{-k}L] measured from each graded endpoint. Levels are added until the
/// extrapolated tail is below relTol/2 of the running value. The integral is declared
/// infinite when the per-level contribution fails to shrink by a factor < 0.999 over
/// 10 consecutive levels once cells are below 2^-48 of the half interval.
/// `refine` splits every cell into that many equal parts.
[[nodiscard]] GradedIntegral integrate_graded(const std::function<double(double)>& f, double a, double b,
                                              double relTol, int refine = 1, GradeEnds ends = GradeEnds::Both);

/// Plain composite Gauss-Legendre over `cells` equal subintervals.
[[nodiscard]] double integrate_gl(const std::function<double(double)>& f, double a, double b, int order,
                                  int cells = 1);

} // namespace peakwidths
