#pragma once

#include "peakwidths/core_params.hpp"
#include "peakwidths/cusp_mesh.hpp"

#include <functional>
#include <string>
#include <vector>

namespace peakwidths {

/// psi_j(y, z) = c_j psi(2^j z - 1) with psi(x) = kappa (x(1-x))^{r+2}, kappa fixing
/// int_0^1 |psi^{(r)}|^p = 1, and c_j fixing ||d_z^r psi_j / g||_p = 1 over the cusp.
struct TestFunctionFamily {
    int r = 1;
    double p = 2.0;
    double logKappa = 0.0;
    std::vector<double> coef; // psi as a polynomial in x, kappa included
    std::vector<int> j;
    std::vector<double> logC;
    /// log of g(2^-j) phi(2^-j)^{-(d-1)/p} 2^{j/p} 2^{-jr}
    std::vector<double> logCFormula;
    /// max/min over j of c_j divided by the formula value
    double formulaSpread = 1.0;

    /// k-th derivative of psi on [0, 1], zero outside.
    [[nodiscard]] double profile(double x, int k = 0) const;
};

/// Throws std::invalid_argument when jLo < 2, jHi < jLo, or a slab violates phi(2^-j) <= 2^-j.
[[nodiscard]] TestFunctionFamily bump_family(const ProblemParams& params, const WeightSpec& g,
                                             const CuspProfile& cusp, int jLo, int jHi);

struct BumpFlatness {
    std::vector<int> j;
    std::vector<double> logNorm;   // log ||psi_j||_{q,v}
    std::vector<double> statistic; // ||psi_j||_{q,v} j^alpha / rho(j)
    double maxOverMin = 1.0;
};

[[nodiscard]] BumpFlatness bump_flatness(const ProblemParams& params, const WeightSpec& g, const WeightSpec& v,
                                         const CuspProfile& cusp, int jLo, int jHi);

/// A probe f with its partial derivatives d_y^ky d_z^kz f, used to normalize by the Sobolev
/// seminorm. Probes with zero seminorm are measured unnormalized.
struct Probe {
    std::string name;
    PlaneFn f;
    std::function<double(int ky, int kz, double y, double z)> derivative;
};

/// The three built-in smooth probes cos(a y + b z + c).
[[nodiscard]] std::vector<Probe> smooth_probes();

struct DecayOptions {
    bool bumps = true;
    std::vector<Probe> probes = smooth_probes();
    /// Smooth probes are measured on slabs j <= probeSlabLimit only.
    int probeSlabLimit = 60;
};

struct DecayRow {
    long long n = 0;          // 2^{Nd}
    long long cells = 0;      // actual cell count including the tail cell
    double worstError = 0.0;
    std::string worstProbe;
    double bumpWorst = 0.0;
    int bumpWorstJ = 0;
    std::vector<double> probeErrors;
    double tailBound = 0.0;   // bound for the unmeshed tail from the A asymptotics
};

struct DecayReport {
    std::vector<double> nValues; // cell counts
    std::vector<double> errors;  // worst meshed error plus the tail bound
    std::vector<double> meshedErrors; // worst measured weighted L_q error over the meshed cells
    std::vector<DecayRow> rows;
    std::vector<std::string> probeNames;
    double slope = 0.0;
    double intercept = 0.0;
    double rSquared = 0.0;
    double residual = 0.0;      // rms of the log residuals of the fit
    double meshedSlope = 0.0;   // fit of meshedErrors alone
    double meshedRSquared = 0.0;
    double bumpSlope = 0.0;     // fit of the worst bump error alone (NaN without bumps)
    double predicted = 0.0; // -min(delta/d, alpha)
    bool exact = false;     // all errors vanish; slope undefined
    std::string verdict;
};

/// Runs the multiscale projection scheme for every n = 2^{Nd} in nList (each a power of 2^d).
/// Throws std::invalid_argument("constructive scheme realizes case-1 rates only") outside case 1.
[[nodiscard]] DecayReport decay_experiment(const ProblemParams& params, const WeightSpec& g, const WeightSpec& v,
                                           const CuspProfile& cusp, const std::vector<long long>& nList,
                                           const DecayOptions& options = {});

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rSquared = 0.0;
    double rmsResidual = 0.0; // root mean square of the log residuals
};

/// Least-squares fit of log y against log x.
[[nodiscard]] LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace peakwidths
