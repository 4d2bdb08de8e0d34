#pragma once

#include "peakwidths/core_params.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <vector>

namespace peakwidths {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] double length() const { return hi - lo; }
};

/// Multiscale grid parameters: n = 2^{Nd}, gamma = 2^{1+eps}.
struct PartitionSchedule {
    int N = 1;
    int d = 2;
    double eps = 0.5;
    int tStar = 0;
    /// Upper limit for grid_step5 (t < floor(qhat Nd / 2)); infinity disables the check.
    double qhat = std::numeric_limits<double>::infinity();

    [[nodiscard]] int Nd() const { return N * d; }
    [[nodiscard]] double gamma() const;
    [[nodiscard]] int m_t(int t) const;       // ceil((1+eps)(t-Nd))
    [[nodiscard]] int m_star(int t) const;    // max{ceil(t-Nd+eps|t-t*|), 0}
    [[nodiscard]] int l_mt(int m, int t) const; // ceil(Nd-t-eps|t-t*|) + m

    /// eps = (d/(2 delta)) |alpha - delta/d|; t* = 0 when alpha > delta/d, else Nd.
    [[nodiscard]] static PartitionSchedule from_exponents(int N, int d, double alpha, double delta,
                                                         double qhat = std::numeric_limits<double>::infinity());
};

/// Breakpoints tau_0 > tau_1 > ... > tau_k; slab j is [tau_j, tau_{j-1}] with 1-D shadow
/// [tau_j - phi(tau_j), tau_{j-1} + phi(tau_{j-1})].
struct IntervalPartition {
    std::vector<double> breakpoints;
    std::vector<double> phiAt;           // phi at each breakpoint
    std::vector<Interval> slabExtent;    // one per slab

    [[nodiscard]] std::size_t slab_count() const { return slabExtent.size(); }
};

[[nodiscard]] IntervalPartition make_partition(const std::vector<double>& breakpoints, const CuspProfile& cusp);

struct MultiplicityCertificate {
    int maxOverlap = 0;
    std::map<int, int> histogram; // overlap count -> number of slabs
    int neighborBound = 0;        // max overlaps with slabs of a different dyadic level
};

/// z_0 > z_1 > ... with z_{k+1} + phi(z_{k+1}) = z_k; stops at the first entry <= floor
/// or after maxLevels steps.
[[nodiscard]] std::vector<double> zk_sequence(const CuspProfile& cusp, double z0, double floor,
                                              std::size_t maxLevels = std::numeric_limits<std::size_t>::max());

/// Unique l with 2^{-j-l-1} < phi(2^{-j}) <= 2^{-j-l}.
[[nodiscard]] int lj_index(const CuspProfile& cusp, int j);

/// Uniform grid 2^{-j} + i 2^{-j-l}, i = 0..2^l, as a partition (requires j >= 2, l <= l_j).
[[nodiscard]] IntervalPartition grid_R_jl(const CuspProfile& cusp, int j, int l);

struct Step5Grid {
    std::vector<long long> s;
    std::vector<long long> j;       // tau(s) = 2^{-j(s)}
    long long card = 0;
    double bound = 0.0;             // 2^m 2^{Nd} 2^{-eps(t-Nd)}
    double fittedC = 0.0;           // card / bound
    long long maxJump = 0;          // max |j(s+1) - j(s)| over consecutive members
};

/// Enumerates J_{m,t} = {s >= 0 : j(s) <= 2^{t+1}, j(s+1) >= 2^t}, j(s) = floor(gamma^{t-Nd} 2^{-m} s).
[[nodiscard]] Step5Grid grid_step5(const PartitionSchedule& schedule, int m, int t);

struct RefinedPartition {
    std::vector<std::vector<Interval>> cells; // each cell is a finite union of disjoint intervals
    std::vector<std::size_t> source;          // injection: cell index -> covering index
};

/// Sequential set difference: cell_i = (U cap E_i) minus the union of E_1..E_{i-1}; empty cells dropped.
[[nodiscard]] RefinedPartition refine_covering_to_partition(const std::vector<Interval>& covering, const Interval& U);

/// Max pairwise shadow overlap count after checking tau_{j-1} - tau_j >= cHat phi(tau_{j-1}).
/// Throws std::invalid_argument naming the first offending j.
[[nodiscard]] MultiplicityCertificate multiplicity_check(const IntervalPartition& partition, double cHat);

/// Max over cells of a of the number of cells of b meeting it in positive length.
[[nodiscard]] int cross_overlap(const IntervalPartition& a, const IntervalPartition& b);

struct CardinalityRow {
    int t = 0;
    int m = 0;
    int l = 0;
    double count = 0.0; // 2^t 2^l
};

struct CardinalityTable {
    std::vector<CardinalityRow> rows;
    double tail = 1.0;  // the single cell below 2^{-2^{Nd+1}}
    double total = 0.0;
    double ratio = 0.0; // total / 2^{Nd}
};

[[nodiscard]] CardinalityTable schedule_cardinalities(const PartitionSchedule& schedule);

} // namespace peakwidths
