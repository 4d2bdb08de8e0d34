#include "peakwidths/core_params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace peakwidths {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double iterated_log(double t, int depth) {
    for (int k = 0; k < depth; ++k) t = std::log(t);
    return t;
}

} // namespace

std::string to_string(WidthKind kind) {
    switch (kind) {
    case WidthKind::Kolmogorov: return "kolmogorov";
    case WidthKind::Linear: return "linear";
    case WidthKind::Gelfand: return "gelfand";
    }
    return "kolmogorov";
}

WidthKind width_kind_from_string(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "kolmogorov") return WidthKind::Kolmogorov;
    if (s == "linear") return WidthKind::Linear;
    if (s == "gelfand") return WidthKind::Gelfand;
    throw std::invalid_argument("unknown width kind: " + name);
}

long long ProblemParams::multi_index_count() const {
    // binomial(r + d - 1, d - 1)
    long long n = r + d - 1, k = d - 1, out = 1;
    for (long long i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

void ProblemParams::validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    if (!(q >= p)) throw std::invalid_argument("q must be at least p");
    if (!std::isfinite(q)) throw std::invalid_argument("q must be finite");
    if (r < 1) throw std::invalid_argument("r must be a positive integer");
    if (d < 2) throw std::invalid_argument("d must be at least 2");
    if (!(delta() > 0.0)) throw std::invalid_argument("delta = r + d/q - d/p must be positive, got " + num(delta()));
}

double SlowlyVaryingFn::floor_value() const {
    int kmax = 1;
    for (const auto& f : factors) {
        if (f.depth < 1) throw std::invalid_argument("slowly varying factor depth must be >= 1");
        kmax = std::max(kmax, f.depth);
    }
    if (domainFloor <= 0.0) {
        double t = 1.0;
        for (int k = 0; k < kmax; ++k) t = std::exp(t);
        return t;
    }
    if (!(domainFloor > 1.0)) throw std::invalid_argument("slowly varying domain floor must exceed 1");
    for (const auto& f : factors)
        if (!(iterated_log(domainFloor, f.depth) > 0.0))
            throw std::invalid_argument("slowly varying domain floor too small for factor depth " +
                                        std::to_string(f.depth));
    return domainFloor;
}

double SlowlyVaryingFn::log_value(double t) const {
    const double tt = std::max(t, floor_value());
    double out = std::log(scale);
    for (const auto& f : factors) out += f.exponent * std::log(iterated_log(tt, f.depth));
    return out;
}

double SlowlyVaryingFn::operator()(double t) const { return std::exp(log_value(t)); }

bool SlowlyVaryingFn::is_constant() const {
    return std::all_of(factors.begin(), factors.end(), [](const SvFactor& f) { return f.exponent == 0.0; });
}

double WeightSpec::log_at_log(double lz) const {
    const double cap = -std::log(2.0);
    if (lz > cap) lz = cap;
    const double a = -lz;
    return beta * a - alphaExp * std::log(a) + sv.log_value(a);
}

double WeightSpec::operator()(double z) const { return std::exp(log_at_log(std::log(z))); }

double CuspProfile::log_at_log(double lz) const {
    const double a = -lz;
    return sigma * lz + theta * std::log(a) + omega.log_value(a);
}

double CuspProfile::operator()(double z) const {
    if (!(z > 0.0) || !(z < 1.0)) throw std::domain_error("cusp profile evaluated outside (0, 1)");
    return std::exp(log_at_log(std::log(z)));
}

std::vector<std::string> CuspProfile::shape_violations() const {
    std::vector<std::string> out;
    if (!(sigma > 1.0)) out.push_back("σ > 1 required");
    const int n = 400;
    const double lo = std::log(std::ldexp(1.0, -60)), hi = std::log(zMax);
    double prev = -std::numeric_limits<double>::infinity();
    bool mono = true, below = true;
    for (int i = 0; i < n; ++i) {
        const double lz = lo + (hi - lo) * i / (n - 1);
        const double lphi = log_at_log(lz);
        if (lphi <= prev) mono = false;
        if (lphi > lz + 1e-12) below = false;
        prev = lphi;
    }
    if (!mono) out.push_back("φ not increasing on (0, zMax]");
    if (!below) out.push_back("φ(z) ≤ z violated on (0, zMax]");
    return out;
}

double qhat_of(const ProblemParams& params) {
    switch (params.kind) {
    case WidthKind::Kolmogorov: return params.q;
    case WidthKind::Linear: return std::min(params.q, params.p_prime());
    case WidthKind::Gelfand: return params.p_prime();
    }
    return params.q;
}

DerivedQuantities derive_quantities(const ProblemParams& params, const WeightSpec& g, const WeightSpec& v,
                                    const CuspProfile& cusp) {
    DerivedQuantities dq;
    const double gap = 1.0 / params.p - 1.0 / params.q;
    dq.delta = params.delta();
    dq.alpha = g.alphaExp + v.alphaExp + cusp.theta * (params.d - 1) * gap;
    dq.qhat = qhat_of(params);

    const double omegaPow = (params.d - 1) * (-gap);
    std::map<int, double> merged;
    auto add = [&merged](const SlowlyVaryingFn& f, double power) {
        for (const auto& fac : f.factors) merged[fac.depth] += power * fac.exponent;
    };
    add(g.sv, 1.0);
    add(v.sv, 1.0);
    add(cusp.omega, omegaPow);
    for (const auto& [depth, e] : merged) dq.rho.factors.push_back({depth, e});
    dq.rho.scale = g.sv.scale * v.sv.scale * std::pow(cusp.omega.scale, omegaPow);
    dq.rho.domainFloor = std::max({g.sv.floor_value(), v.sv.floor_value(), cusp.omega.floor_value()});
    return dq;
}

RegimeVerdict validate_regime(const ProblemParams& params, const WeightSpec& g, const WeightSpec& v,
                              const CuspProfile& cusp) {
    RegimeVerdict verdict;
    auto fail = [&verdict](std::string msg) {
        verdict.ok = false;
        verdict.violations.push_back(std::move(msg));
    };
    if (!(params.p > 1.0) || !(params.q >= params.p) || !std::isfinite(params.q))
        fail("1 < p ≤ q < ∞ required");
    if (params.r < 1) fail("r ≥ 1 required");
    if (params.d < 2) fail("d ≥ 2 required");
    if (!verdict.ok) return verdict;

    const double gap = 1.0 / params.q - 1.0 / params.p;
    const double spread = cusp.sigma * (params.d - 1) + 1.0;
    if (!(cusp.sigma > 1.0)) fail("σ > 1 required");
    const double lhs = params.r + spread * gap;
    if (std::abs(lhs - (g.beta + v.beta)) > 1e-12)
        fail("r+(σ(d−1)+1)(1/q−1/p) = " + num(lhs) + " ≠ β_g+β_v = " + num(g.beta + v.beta));
    const double integrability = spread - v.beta * params.q;
    if (!(integrability > 0.0)) fail("σ(d−1)+1−β_v q = " + num(integrability) + " ≤ 0");

    DerivedQuantities dq;
    try {
        dq = derive_quantities(params, g, v, cusp);
    } catch (const std::exception& e) {
        fail(std::string("derived quantities unavailable: ") + e.what());
        return verdict;
    }
    if (!(dq.alpha > 0.0)) fail("α = " + num(dq.alpha) + " ≤ 0");
    if (!(dq.delta > 0.0)) fail("δ = " + num(dq.delta) + " ≤ 0");
    for (const auto& s : cusp.shape_violations())
        if (s != "σ > 1 required") fail(s);
    return verdict;
}

SvCheckReport slowly_varying_check(const SlowlyVaryingFn& sv, double eps, const std::vector<double>& yGrid,
                                   const std::vector<double>& tGrid) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    SvCheckReport rep;
    rep.c1 = std::numeric_limits<double>::infinity();
    rep.c2 = -std::numeric_limits<double>::infinity();
    rep.lowerMax = -std::numeric_limits<double>::infinity();
    rep.upperMin = std::numeric_limits<double>::infinity();
    double worstDev = -1.0;
    for (double y : yGrid) {
        const double ly = sv.log_value(y);
        for (double t : tGrid) {
            const double lr = sv.log_value(t * y) - ly;
            const double lower = std::exp(lr + eps * std::log(t));
            const double upper = std::exp(lr - eps * std::log(t));
            if (!std::isfinite(lower) || !std::isfinite(upper) || lower <= 0.0 || upper <= 0.0)
                rep.bounded = false;
            rep.c1 = std::min(rep.c1, lower);
            rep.lowerMax = std::max(rep.lowerMax, lower);
            rep.c2 = std::max(rep.c2, upper);
            rep.upperMin = std::min(rep.upperMin, upper);
            const double dev = std::abs(lr) - eps * std::abs(std::log(t));
            if (dev > worstDev) {
                worstDev = dev;
                rep.worstT = t;
                rep.worstY = y;
            }
        }
    }
    return rep;
}

double weight_local_ratio(const WeightSpec& g, const CuspProfile& cusp, double z, int samples) {
    const double ph = cusp(z);
    const double a = std::max(z / 2.0, z - ph), b = z + ph;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < samples; ++i) {
        const double s = a + (b - a) * i / (samples - 1);
        const double lg = g.log_at_log(std::log(s));
        lo = std::min(lo, lg);
        hi = std::max(hi, lg);
    }
    return std::exp(hi - lo);
}

} // namespace peakwidths
