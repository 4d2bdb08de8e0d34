#pragma once

#include <string>
#include <vector>

namespace peakwidths {

enum class WidthKind { Kolmogorov, Linear, Gelfand };

[[nodiscard]] std::string to_string(WidthKind kind);
[[nodiscard]] WidthKind width_kind_from_string(const std::string& name);

/// Integrability/smoothness tuple (p, q, r, d) with the width kind.
struct ProblemParams {
    double p = 2.0;
    double q = 2.0;
    int r = 1;
    int d = 2;
    WidthKind kind = WidthKind::Kolmogorov;

    [[nodiscard]] double delta() const { return r + d / q - d / p; }
    [[nodiscard]] double p_prime() const { return p / (p - 1.0); }
    [[nodiscard]] double q_prime() const { return q / (q - 1.0); }
    /// Number of multi-indices of order r in d variables.
    [[nodiscard]] long long multi_index_count() const;
    /// Throws std::invalid_argument when 1 < p <= q < inf, r >= 1, d >= 2 or delta > 0 fails.
    void validate() const;
};

struct SvFactor {
    int depth = 1;       // number of log iterations
    double exponent = 0; // power applied to the iterated log
};

/// Finite product of iterated-log powers, t -> scale * prod (log^{(k)} t)^{e}.
/// Frozen to its value at domainFloor for t below it.
struct SlowlyVaryingFn {
    std::vector<SvFactor> factors;
    double domainFloor = 0.0; // 0 selects the smallest floor where every factor is positive
    double scale = 1.0;

    [[nodiscard]] double floor_value() const;
    [[nodiscard]] double log_value(double t) const;
    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] bool is_constant() const;
};

/// z^{-beta} |log z|^{-alphaExp} sv(|log z|) on (0, 1/2], constant above 1/2.
struct WeightSpec {
    double beta = 0.0;
    double alphaExp = 0.0;
    SlowlyVaryingFn sv;

    /// Logarithm of the weight given lz = log z; usable far below double underflow in z.
    [[nodiscard]] double log_at_log(double lz) const;
    [[nodiscard]] double operator()(double z) const;
};

/// phi(z) = z^sigma |log z|^theta omega(|log z|) on (0, zMax].
struct CuspProfile {
    double sigma = 2.0;
    double theta = 0.0;
    SlowlyVaryingFn omega;
    double zMax = 0.5;

    [[nodiscard]] double log_at_log(double lz) const;
    [[nodiscard]] double operator()(double z) const;
    /// Sampled checks of sigma > 1, monotonicity and phi(z) <= z on (0, zMax].
    [[nodiscard]] std::vector<std::string> shape_violations() const;
};

struct DerivedQuantities {
    double delta = 0.0;
    double alpha = 0.0;
    double qhat = 0.0;
    SlowlyVaryingFn rho;
};

[[nodiscard]] double qhat_of(const ProblemParams& params);

[[nodiscard]] DerivedQuantities derive_quantities(const ProblemParams& params, const WeightSpec& g,
                                                  const WeightSpec& v, const CuspProfile& cusp);

struct RegimeVerdict {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks the standing hypotheses and names every failure; never throws.
[[nodiscard]] RegimeVerdict validate_regime(const ProblemParams& params, const WeightSpec& g,
                                            const WeightSpec& v, const CuspProfile& cusp);

struct SvCheckReport {
    double c1 = 0.0;       // min over the grid of sv(ty) / (sv(y) t^{-eps})
    double c2 = 0.0;       // max over the grid of sv(ty) / (sv(y) t^{eps})
    double lowerMax = 0.0; // max of sv(ty) / (sv(y) t^{-eps})
    double upperMin = 0.0; // min of sv(ty) / (sv(y) t^{eps})
    double worstT = 1.0;
    double worstY = 1.0;
    bool bounded = true;   // all ratios finite and positive
};

[[nodiscard]] SvCheckReport slowly_varying_check(const SlowlyVaryingFn& sv, double eps,
                                                 const std::vector<double>& yGrid,
                                                 const std::vector<double>& tGrid);

/// Sampled max of g(t)/g(s) over s, t in [max(z/2, z - phi(z)), z + phi(z)].
[[nodiscard]] double weight_local_ratio(const WeightSpec& g, const CuspProfile& cusp, double z,
                                        int samples = 33);

} // namespace peakwidths
