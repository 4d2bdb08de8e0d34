#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

namespace peakwidths {

enum ExitCode : int {
    kExitOk = 0,
    kExitUnreadable = 1, // config missing, unreadable or not JSON; output not writable
    kExitInvalid = 2,    // schema or hypothesis validation failure
    kExitDivergent = 3,  // infinite constants or non-finite fitted quantities
};

struct RunConfig {
    std::string subcommand; // exponent, hardy, partition, ballwidths, decay, all
    std::string configPath;
    std::string outDir = ".";
    std::uint64_t seed = 0;
    double tol = 1e-10;

    // hardy
    std::optional<std::pair<double, double>> window;
    double lambda = 0.5;
    int oracleGrid = 0; // 0: no discretized cross-check
    bool sweep = false;

    // partition
    int N = 3;
    int depth = 100;
    double cHat = 0.25;

    // ballwidths
    int nu = 3;
    int n = 1;
    double bp = 2.0;
    double bq = 1.0;
    std::string kind = "kolmogorov";
    int restarts = 64;

    // decay
    long long nmin = 64;
    long long nmax = 4096;
    int probes = 3;
};

/// Dispatches the subcommand, writes CSV/JSON outputs and manifest.json into outDir, and
/// returns an ExitCode. Messages go to `log`.
[[nodiscard]] int run(const RunConfig& config, std::ostream& log);

} // namespace peakwidths
