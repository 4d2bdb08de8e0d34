#include "peakwidths/runner.hpp"

#include "peakwidths/ball_widths.hpp"
#include "peakwidths/config.hpp"
#include "peakwidths/cusp_empirics.hpp"
#include "peakwidths/exponents.hpp"
#include "peakwidths/hardy.hpp"
#include "peakwidths/io.hpp"
#include "peakwidths/parallel.hpp"
#include "peakwidths/partition.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace peakwidths {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Divergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    const RunConfig& cfg;
    std::ostream& log;
    fs::path dir;
    std::optional<ModelConfig> model;
    json outputs = json::array();
    json results = json::object();
    bool divergent = false;

    const ModelConfig& need_model() {
        if (!model) {
            if (cfg.configPath.empty()) throw ConfigReadError("--config is required for '" + cfg.subcommand + "'");
            model = load_model_config(cfg.configPath);
        }
        return *model;
    }

    std::string path(const std::string& name) {
        outputs.push_back(name);
        return (dir / name).string();
    }
};

void require_regime(const ModelConfig& m) {
    const RegimeVerdict verdict = validate_regime(m.problem, m.g, m.v, m.cusp);
    if (verdict.ok) return;
    std::string msg = "standing hypotheses fail:";
    for (const auto& v : verdict.violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
}

void do_exponent(Context& ctx) {
    const ModelConfig& m = ctx.need_model();
    require_regime(m);
    const DerivedQuantities dq = derive_quantities(m.problem, m.g, m.v, m.cusp);
    const WidthPrediction pred = theorem2_exponent(dq, m.problem);
    CsvTable csv({"regime", "thetaStar", "sigmaStar", "theta1", "theta2", "theta3", "theta4", "qhat", "delta", "alpha",
                  "note"});
    csv.cell(pred.regime);
    if (pred.covered)
        csv.cell(pred.thetaStar).cell(pred.sigmaStar);
    else
        csv.empty().empty();
    for (int i = 0; i < 4; ++i) {
        if (pred.hasThetas)
            csv.cell(pred.theta[i]);
        else
            csv.empty();
    }
    csv.cell(dq.qhat).cell(dq.delta).cell(dq.alpha).cell(pred.note);
    csv.end_row();
    csv.write(ctx.path("exponent.csv"));
    ctx.results["exponent"] = {{"regime", pred.regime}, {"covered", pred.covered}};
    ctx.log << "exponent: " << pred.regime;
    if (pred.covered) ctx.log << " thetaStar=" << format_double(pred.thetaStar);
    ctx.log << "\n";
}

void do_hardy(Context& ctx) {
    const ModelConfig& m = ctx.need_model();
    EmbeddingWindow window;
    if (ctx.cfg.window) {
        window.tauMinus = ctx.cfg.window->first;
        window.tauPlus = ctx.cfg.window->second;
    }
    window.lambda = ctx.cfg.lambda;
    const HardyResult res = embedding_A(window, m.g, m.v, m.cusp, m.problem, ctx.cfg.tol);

    CsvTable csv({"tau_minus", "tau_plus", "lambda", "A0", "A1", "argmax_t", "quad_error", "oracle_norm"});
    csv.cell(window.tauMinus).cell(window.tauPlus).cell(window.lambda).cell(res.c0).cell(res.c1).cell(res.argmax());
    csv.cell(res.quadError);
    if (ctx.cfg.oracleGrid > 0 && !res.infinite) {
        const KernelSpec spec = embedding_kernel(m.g, m.v, m.cusp, m.problem, window.tauMinus, window.tauPlus);
        csv.cell(discretized_operator_norm(spec, ctx.cfg.oracleGrid, ctx.cfg.seed));
    } else {
        csv.empty();
    }
    csv.end_row();
    csv.write(ctx.path("hardy.csv"));
    ctx.results["hardy"] = {{"A0", res.c0}, {"A1", res.c1}, {"infinite", res.infinite}};
    ctx.log << "hardy: A0=" << format_double(res.c0) << " A1=" << format_double(res.c1) << "\n";
    if (res.infinite) throw Divergence("hardy: " + res.note);

    if (ctx.cfg.sweep) {
        const AFlatnessReport rep =
            asymptotic_A_check(m.g, m.v, m.cusp, m.problem, log_grid(std::ldexp(1.0, -16), 0.25, 15), ctx.cfg.tol);
        CsvTable sw({"tau", "A", "argmax_t", "quad_error", "ratio"});
        for (size_t i = 0; i < rep.tau.size(); ++i) {
            sw.cell(rep.tau[i]).cell(rep.A[i]).cell(rep.argmaxT[i]).cell(rep.quadError[i]).cell(rep.ratio[i]);
            sw.end_row();
        }
        sw.write(ctx.path("hardy_sweep.csv"));
        ctx.results["hardy"]["sweep_max_over_min"] = rep.maxOverMin;
        ctx.log << "hardy sweep: max/min=" << format_double(rep.maxOverMin) << "\n";
        if (!rep.finite) throw Divergence("hardy sweep: A constant infinite on the grid");
    }
}

void do_partition(Context& ctx) {
    const ModelConfig& m = ctx.need_model();
    require_regime(m);
    const DerivedQuantities dq = derive_quantities(m.problem, m.g, m.v, m.cusp);
    if (ctx.cfg.N < 1 || ctx.cfg.N * m.problem.d > 16) throw std::invalid_argument("partition requires 1 <= N d <= 16");
    const PartitionSchedule sched =
        PartitionSchedule::from_exponents(ctx.cfg.N, m.problem.d, dq.alpha, dq.delta, dq.qhat);

    CsvTable csv({"t", "j", "m", "l", "i", "tau", "log2_tau"});
    for (int t = 0; t <= sched.Nd(); ++t) {
        const int mm = sched.m_star(t), l = sched.l_mt(mm, t);
        if (l > 24) throw std::invalid_argument("partition level above 24");
        for (long long j = std::max(2LL, 1LL << t); j < (2LL << t); ++j) {
            for (long long i = 0; i < (1LL << l); ++i) {
                const double lg = -static_cast<double>(j) + std::log2(1.0 + std::ldexp(static_cast<double>(i), -l));
                csv.cell(t).cell(j).cell(mm).cell(l).cell(i).cell(std::exp2(lg)).cell(lg);
                csv.end_row();
            }
        }
    }
    csv.write(ctx.path("partition.csv"));

    const std::vector<double> zk = zk_sequence(m.cusp, m.cusp.zMax, 1e-300, static_cast<std::size_t>(ctx.cfg.depth));
    const MultiplicityCertificate cert = multiplicity_check(make_partition(zk, m.cusp), ctx.cfg.cHat);
    const CardinalityTable card = schedule_cardinalities(sched);
    json hist = json::object();
    for (const auto& [k, c] : cert.histogram) hist[std::to_string(k)] = c;
    json rows = json::array();
    for (const auto& r : card.rows) rows.push_back({{"t", r.t}, {"m", r.m}, {"l", r.l}, {"count", r.count}});
    const json doc = {
        {"schedule",
         {{"N", sched.N}, {"d", sched.d}, {"Nd", sched.Nd()}, {"eps", sched.eps}, {"t_star", sched.tStar},
          {"gamma", sched.gamma()}}},
        {"multiplicity",
         {{"depth", ctx.cfg.depth},
          {"c_hat", ctx.cfg.cHat},
          {"slabs", zk.size() - 1},
          {"max_overlap", cert.maxOverlap},
          {"histogram", hist},
          {"neighbor_bound", cert.neighborBound}}},
        {"cardinalities", {{"rows", rows}, {"tail", card.tail}, {"total", card.total}, {"ratio", card.ratio}}}};
    write_json(ctx.path("partition_certificate.json"), doc);
    ctx.results["partition"] = {{"max_overlap", cert.maxOverlap}, {"cardinality_ratio", card.ratio}};
    ctx.log << "partition: maxOverlap=" << cert.maxOverlap << " ratio=" << format_double(card.ratio) << "\n";
}

void do_ballwidths(Context& ctx) {
    BallWidthProblem prob;
    prob.nu = ctx.cfg.nu;
    prob.n = ctx.cfg.n;
    prob.p = ctx.cfg.bp;
    prob.q = ctx.cfg.bq;
    std::string kind;
    for (char c : ctx.cfg.kind) kind.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (kind == "kolmogorov")
        prob.kind = BallWidthKind::Kolmogorov;
    else if (kind == "gelfand")
        prob.kind = BallWidthKind::Gelfand;
    else
        throw std::invalid_argument("--kind must be kolmogorov or gelfand");
    BallWidthOptions opt;
    opt.restarts = ctx.cfg.restarts;
    opt.seed = ctx.cfg.seed;
    if (opt.restarts < 1) throw std::invalid_argument("--restarts must be >= 1");
    const BallWidthEstimate est =
        prob.kind == BallWidthKind::Kolmogorov ? kolmogorov_width_est(prob, opt) : gelfand_width_est(prob, opt);

    std::optional<double> phi;
    try {
        phi = prob.kind == BallWidthKind::Kolmogorov ? gluskin_phi(prob.n, prob.nu, prob.p, prob.q)
                                                     : gelfand_order(prob.n, prob.nu, prob.p, prob.q);
    } catch (const std::invalid_argument&) {
    }
    CsvTable csv({"nu", "n", "p", "q", "kind", "estimate_upper", "inner_sup", "gluskin_phi", "ratio"});
    csv.cell(prob.nu).cell(prob.n).cell(prob.p).cell(prob.q).cell(kind).cell(est.estimateUpper).cell(est.innerSup);
    if (phi)
        csv.cell(*phi).cell(est.estimateUpper / *phi);
    else
        csv.empty().empty();
    csv.end_row();
    csv.write(ctx.path("ballwidths.csv"));
    ctx.results["ballwidths"] = {{"estimate_upper", est.estimateUpper}, {"inner_sup", est.innerSup}};
    ctx.log << "ballwidths: estimate=" << format_double(est.estimateUpper) << "\n";
}

void do_decay(Context& ctx) {
    const ModelConfig& m = ctx.need_model();
    require_regime(m);
    std::vector<long long> nList;
    const long long step = 1LL << m.problem.d;
    for (long long n = step; n <= ctx.cfg.nmax && n > 0; n *= step)
        if (n >= ctx.cfg.nmin) nList.push_back(n);
    if (nList.size() < 2) throw std::invalid_argument("[nmin, nmax] must contain two powers of 2^d");
    if (ctx.cfg.probes < 0 || ctx.cfg.probes > 3) throw std::invalid_argument("--probes must lie in [0, 3]");
    DecayOptions opt;
    opt.probes.resize(static_cast<std::size_t>(ctx.cfg.probes));
    const DecayReport rep = decay_experiment(m.problem, m.g, m.v, m.cusp, nList, opt);

    std::vector<std::string> header{"n", "cells", "worst_error", "meshed_error", "tail_bound", "bump_error", "bump_j",
                                    "worst_probe"};
    for (const auto& name : rep.probeNames) header.push_back(name);
    CsvTable csv(header);
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        const DecayRow& r = rep.rows[i];
        csv.cell(r.n).cell(r.cells).cell(rep.errors[i]).cell(r.worstError).cell(r.tailBound).cell(r.bumpWorst);
        csv.cell(r.bumpWorstJ).cell(r.worstProbe);
        for (double e : r.probeErrors) csv.cell(e);
        csv.end_row();
    }
    csv.write(ctx.path("decay.csv"));
    const json summary = {{"slope", rep.slope},
                          {"intercept", rep.intercept},
                          {"r_squared", rep.rSquared},
                          {"residual", rep.residual},
                          {"meshed_slope", rep.meshedSlope},
                          {"meshed_r_squared", rep.meshedRSquared},
                          {"bump_slope", rep.bumpSlope},
                          {"predicted_exponent", rep.predicted},
                          {"exact", rep.exact},
                          {"verdict", rep.verdict}};
    write_json(ctx.path("decay_summary.json"), summary);
    ctx.results["decay"] = {{"slope", rep.slope}, {"verdict", rep.verdict}};
    ctx.log << "decay: slope=" << format_double(rep.slope) << " predicted=" << format_double(rep.predicted) << " "
            << rep.verdict << "\n";
    if (!rep.exact && !std::isfinite(rep.slope)) throw Divergence("decay: non-finite slope");
}

void do_all(Context& ctx) {
    do_exponent(ctx);
    try {
        do_hardy(ctx);
    } catch (const Divergence& e) {
        ctx.divergent = true;
        ctx.log << e.what() << "\n";
    }
    do_partition(ctx);
    do_ballwidths(ctx);
    const ModelConfig& m = ctx.need_model();
    const WidthPrediction pred = theorem2_exponent(derive_quantities(m.problem, m.g, m.v, m.cusp), m.problem);
    if (pred.regime == "case1" && m.problem.d == 2) {
        do_decay(ctx);
    } else {
        ctx.results["decay"] = {{"skipped", "constructive scheme realizes case-1 rates only"}};
        ctx.log << "decay: skipped (regime " << pred.regime << ")\n";
    }
}

json flags_json(const RunConfig& c) {
    json f = {{"out", c.outDir}, {"seed", c.seed}, {"tol", c.tol}};
    if (c.subcommand == "hardy" || c.subcommand == "all") {
        if (c.window) f["window"] = {c.window->first, c.window->second};
        f["lambda"] = c.lambda;
        f["oracle_grid"] = c.oracleGrid;
        f["sweep"] = c.sweep;
    }
    if (c.subcommand == "partition" || c.subcommand == "all") {
        f["N"] = c.N;
        f["depth"] = c.depth;
        f["c_hat"] = c.cHat;
    }
    if (c.subcommand == "ballwidths" || c.subcommand == "all") {
        f["nu"] = c.nu;
        f["n"] = c.n;
        f["p"] = c.bp;
        f["q"] = c.bq;
        f["kind"] = c.kind;
        f["restarts"] = c.restarts;
    }
    if (c.subcommand == "decay" || c.subcommand == "all") {
        f["nmin"] = c.nmin;
        f["nmax"] = c.nmax;
        f["probes"] = c.probes;
    }
    return f;
}

} // namespace

int run(const RunConfig& config, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, log, fs::path(config.outDir)};
    int status = kExitOk;
    std::string message;
    try {
        std::error_code ec;
        fs::create_directories(ctx.dir, ec);
        if (ec || !fs::is_directory(ctx.dir)) {
            log << "error: output directory '" << config.outDir << "' is not writable\n";
            return kExitUnreadable;
        }
        if (config.subcommand == "exponent")
            do_exponent(ctx);
        else if (config.subcommand == "hardy")
            do_hardy(ctx);
        else if (config.subcommand == "partition")
            do_partition(ctx);
        else if (config.subcommand == "ballwidths")
            do_ballwidths(ctx);
        else if (config.subcommand == "decay")
            do_decay(ctx);
        else if (config.subcommand == "all")
            do_all(ctx);
        else
            throw std::invalid_argument("unknown subcommand '" + config.subcommand + "'");
        if (ctx.divergent) status = kExitDivergent;
    } catch (const ConfigReadError& e) {
        status = kExitUnreadable;
        message = e.what();
    } catch (const Divergence& e) {
        status = kExitDivergent;
        message = e.what();
    } catch (const std::invalid_argument& e) {
        status = kExitInvalid;
        message = e.what();
    } catch (const std::exception& e) {
        status = kExitDivergent;
        message = e.what();
    }
    if (!message.empty()) log << "error: " << message << "\n";

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {
        {"tool", "peakwidths"},
        {"version", kVersion},
        {"subcommand", config.subcommand},
        {"seed", config.seed},
        {"timestamp", utc_timestamp()},
        {"wall_time_s", wall},
        {"threads", thread_cap()},
        {"inputs",
         {{"config_path", config.configPath},
          {"config", ctx.model ? ctx.model->document : json()},
          {"flags", flags_json(config)}}},
        {"outputs", ctx.outputs},
        {"results", ctx.results},
        {"status", status},
        {"message", message},
        {"versions",
         {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}}}};
    try {
        write_json((ctx.dir / "manifest.json").string(), manifest);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        if (status == kExitOk) status = kExitUnreadable;
    }
    return status;
}

} // namespace peakwidths
