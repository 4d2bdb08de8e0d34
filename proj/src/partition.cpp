#include "peakwidths/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace peakwidths {

namespace {

// Ceiling that ignores round-off just above an integer.
int safe_ceil(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

} // namespace

double PartitionSchedule::gamma() const { return std::exp2(1.0 + eps); }

int PartitionSchedule::m_t(int t) const { return safe_ceil((1.0 + eps) * (t - Nd())); }

int PartitionSchedule::m_star(int t) const {
    return std::max(safe_ceil(t - Nd() + eps * std::abs(t - tStar)), 0);
}

int PartitionSchedule::l_mt(int m, int t) const { return safe_ceil(Nd() - t - eps * std::abs(t - tStar)) + m; }

PartitionSchedule PartitionSchedule::from_exponents(int N, int d, double alpha, double delta, double qhat) {
    PartitionSchedule s;
    s.N = N;
    s.d = d;
    s.eps = d / (2.0 * delta) * std::abs(alpha - delta / d);
    s.tStar = alpha > delta / d ? 0 : N * d;
    s.qhat = qhat;
    return s;
}

IntervalPartition make_partition(const std::vector<double>& breakpoints, const CuspProfile& cusp) {
    IntervalPartition part;
    part.breakpoints = breakpoints;
    for (size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i - 1])) throw std::invalid_argument("breakpoints must be strictly decreasing");
    for (double b : breakpoints) part.phiAt.push_back(cusp(b));
    for (size_t i = 1; i < breakpoints.size(); ++i)
        part.slabExtent.push_back({breakpoints[i] - part.phiAt[i], breakpoints[i - 1] + part.phiAt[i - 1]});
    return part;
}

std::vector<double> zk_sequence(const CuspProfile& cusp, double z0, double floor, std::size_t maxLevels) {
    if (!(z0 > 0.0) || z0 > 0.5) throw std::invalid_argument("z0 must lie in (0, 1/2]");
    if (!(floor > 0.0)) throw std::invalid_argument("floor must be positive");
    std::vector<double> out{z0};
    while (out.back() > floor && out.size() <= maxLevels) {
        const double zk = out.back();
        double lo = 0.5 * zk, hi = zk;
        const int samples = 16;
        double prev = -1.0;
        for (int i = 0; i <= samples; ++i) {
            const double ph = cusp(lo + (hi - lo) * i / samples);
            if (ph < prev) throw std::runtime_error("φ is not monotone on the bisection bracket below z = " + std::to_string(zk));
            prev = ph;
        }
        auto h = [&](double z) { return z + cusp(z) - zk; };
        if (h(lo) > 0.0) throw std::runtime_error("φ(z) > z on the bisection bracket");
        for (int it = 0; it < 200 && hi - lo > 1e-14 * zk; ++it) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) > 0.0 ? hi : lo) = mid;
        }
        const double z = 0.5 * (lo + hi);
        if (std::abs(h(z)) > 1e-12 * zk) throw std::runtime_error("z_k recursion residual above 1e-12 z_k");
        out.push_back(z);
    }
    return out;
}

int lj_index(const CuspProfile& cusp, int j) {
    if (j < 1) throw std::invalid_argument("j must be >= 1");
    const double ln2 = std::log(2.0);
    const double lphi = cusp.log_at_log(-j * ln2);
    if (lphi > -j * ln2 + 1e-12) throw std::invalid_argument("φ(2^-j) > 2^-j violates the normalization φ(z) ≤ z");
    const double x = -j - lphi / ln2;
    int l = static_cast<int>(std::floor(x + 1e-9));
    if (l < 0) l = 0;
    return l;
}

IntervalPartition grid_R_jl(const CuspProfile& cusp, int j, int l) {
    if (j < 2) throw std::invalid_argument("grid_R_jl requires j >= 2");
    if (l < 0) throw std::invalid_argument("l must be nonnegative");
    const int lj = lj_index(cusp, j);
    if (l > lj) throw std::invalid_argument("l = " + std::to_string(l) + " exceeds l_j = " + std::to_string(lj));
    if (l > 40) throw std::invalid_argument("grid_R_jl limited to l <= 40");
    const long long cells = 1LL << l;
    std::vector<double> bps;
    bps.reserve(cells + 1);
    for (long long i = cells; i >= 0; --i) bps.push_back(std::ldexp(1.0, -j) + std::ldexp(static_cast<double>(i), -j - l));
    return make_partition(bps, cusp);
}

Step5Grid grid_step5(const PartitionSchedule& schedule, int m, int t) {
    const int Nd = schedule.Nd();
    if (t < Nd + 1) throw std::invalid_argument("grid_step5 requires t >= Nd + 1");
    if (std::isfinite(schedule.qhat) && !(t < std::floor(schedule.qhat * Nd / 2.0)))
        throw std::invalid_argument("grid_step5 requires t < floor(qhat Nd / 2)");
    if (m < 0 || m > schedule.m_t(t)) throw std::invalid_argument("grid_step5 requires 0 <= m <= m_t");
    if (t > 24) throw std::invalid_argument("grid_step5 enumeration limited to t <= 24");
    const double c = std::exp2((1.0 + schedule.eps) * (t - Nd) - m);
    auto jof = [c](long long s) { return static_cast<long long>(std::floor(c * static_cast<double>(s))); };
    const long long lowJ = 1LL << t, highJ = 1LL << (t + 1);
    Step5Grid g;
    long long prevJ = -1;
    for (long long s = 0;; ++s) {
        const long long js = jof(s);
        if (js > highJ) break;
        if (jof(s + 1) < lowJ) continue;
        g.s.push_back(s);
        g.j.push_back(js);
        if (prevJ >= 0) g.maxJump = std::max(g.maxJump, js - prevJ);
        prevJ = js;
    }
    g.card = static_cast<long long>(g.s.size());
    g.bound = std::exp2(m + Nd - schedule.eps * (t - Nd));
    g.fittedC = g.card / g.bound;
    return g;
}

RefinedPartition refine_covering_to_partition(const std::vector<Interval>& covering, const Interval& U) {
    RefinedPartition out;
    std::vector<Interval> used; // union of earlier slabs, kept sorted and merged
    for (size_t i = 0; i < covering.size(); ++i) {
        const Interval& E = covering[i];
        if (!(E.hi > E.lo)) throw std::invalid_argument("covering slabs must have positive length");
        std::vector<Interval> pieces;
        Interval base{std::max(E.lo, U.lo), std::min(E.hi, U.hi)};
        if (base.hi > base.lo) {
            double cur = base.lo;
            for (const Interval& u : used) {
                if (u.hi <= cur) continue;
                if (u.lo >= base.hi) break;
                if (u.lo > cur) pieces.push_back({cur, std::min(u.lo, base.hi)});
                cur = std::max(cur, u.hi);
                if (cur >= base.hi) break;
            }
            if (cur < base.hi) pieces.push_back({cur, base.hi});
        }
        if (!pieces.empty()) {
            out.cells.push_back(pieces);
            out.source.push_back(i);
        }
        used.push_back(E);
        std::sort(used.begin(), used.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> merged;
        for (const Interval& u : used) {
            if (!merged.empty() && u.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, u.hi);
            else merged.push_back(u);
        }
        used.swap(merged);
    }
    return out;
}

MultiplicityCertificate multiplicity_check(const IntervalPartition& partition, double cHat) {
    const auto& bp = partition.breakpoints;
    for (size_t j = 1; j < bp.size(); ++j) {
        const double gap = bp[j - 1] - bp[j];
        if (gap < cHat * partition.phiAt[j - 1] * (1.0 - 1e-12))
            throw std::invalid_argument("gap hypothesis τ_{j-1} − τ_j ≥ ĉ φ(τ_{j-1}) violated at j = " + std::to_string(j));
    }
    MultiplicityCertificate cert;
    const auto& ext = partition.slabExtent;
    const size_t n = ext.size();
    std::vector<int> level(n);
    for (size_t i = 0; i < n; ++i) level[i] = static_cast<int>(std::floor(-std::log2(bp[i])));
    for (size_t i = 0; i < n; ++i) {
        int count = 0, cross = 0;
        for (size_t k = 0; k < n; ++k) {
            if (std::max(ext[i].lo, ext[k].lo) < std::min(ext[i].hi, ext[k].hi)) {
                ++count;
                if (level[k] != level[i]) ++cross;
            }
        }
        cert.maxOverlap = std::max(cert.maxOverlap, count);
        cert.neighborBound = std::max(cert.neighborBound, cross);
        ++cert.histogram[count];
    }
    return cert;
}

int cross_overlap(const IntervalPartition& a, const IntervalPartition& b) {
    int best = 0;
    for (size_t i = 1; i < a.breakpoints.size(); ++i) {
        const double alo = a.breakpoints[i], ahi = a.breakpoints[i - 1];
        int count = 0;
        for (size_t k = 1; k < b.breakpoints.size(); ++k)
            if (std::max(alo, b.breakpoints[k]) < std::min(ahi, b.breakpoints[k - 1])) ++count;
        best = std::max(best, count);
    }
    return best;
}

CardinalityTable schedule_cardinalities(const PartitionSchedule& schedule) {
    CardinalityTable tab;
    const int Nd = schedule.Nd();
    for (int t = 0; t <= Nd; ++t) {
        CardinalityRow row;
        row.t = t;
        row.m = schedule.m_star(t);
        row.l = schedule.l_mt(row.m, t);
        row.count = std::exp2(t + row.l);
        tab.total += row.count;
        tab.rows.push_back(row);
    }
    tab.total += tab.tail;
    tab.ratio = tab.total / std::exp2(Nd);
    return tab;
}

} // namespace peakwidths
