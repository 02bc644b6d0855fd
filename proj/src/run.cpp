#include "qhlab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qhlab/csv.hpp"
#include "qhlab/errors.hpp"
#include "qhlab/fraccalc.hpp"
#include "qhlab/parallel.hpp"
#include "qhlab/replicate.hpp"
#include "qhlab/sampler.hpp"
#include "qhlab/smallball.hpp"

namespace qhlab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Ctx {
    const ExperimentConfig& cfg;
    ProcessModel model;
    fs::path dir;
    unsigned threads;
    std::vector<std::string> outputs;
    std::vector<std::string> flags;
    std::vector<std::string> summary;

    void emit(const CsvTable& t, const std::string& rel) {
        t.write(dir / rel);
        outputs.push_back(rel);
    }
    void line(const std::string& k, const std::string& v) {
        std::ostringstream os;
        os << "  " << std::left << std::setw(32) << k << v;
        summary.push_back(os.str());
    }
};

double default_H(const ExperimentConfig& c) { return c.model.variant == "wiener" ? 0.5 : c.model.H; }
double env_H1(const ExperimentConfig& c) { return c.cond_H1.value_or(default_H(c)); }
double env_H2(const ExperimentConfig& c) { return c.cond_H2.value_or(default_H(c)); }

std::string pct(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << 100.0 * x << "%";
    return os.str();
}

std::string g6(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

// ---------------------------------------------------------------- simulate

void cmd_simulate(Ctx& c) {
    const auto& cfg = c.cfg;
    SamplerOptions so;
    so.route = cfg.route;
    PathBatch b = sample_paths(c.model, cfg.grid, cfg.m_paths, RngSpec{cfg.seed, 0}, c.threads, so);
    CsvTable t({"path", "i", "t", "value"});
    for (std::size_t j = 0; j < b.m; ++j) {
        const double* r = b.row(j);
        for (int i = 0; i <= cfg.grid.n; ++i) {
            t.cell(j).cell(i).cell(cfg.grid.t(i)).cell(r[i]);
            t.end_row();
        }
    }
    c.emit(t, "paths.csv");
    if (cfg.dump) {
        std::ofstream os(c.dir / "paths.qhlx", std::ios::binary);
        write_path_batch(b, os);
        if (!os) throw NumericError("write failed: paths.qhlx");
        c.outputs.push_back("paths.qhlx");
    }
    double s2 = 0.0;
    for (std::size_t j = 0; j < b.m; ++j) s2 += b.row(j)[cfg.grid.n] * b.row(j)[cfg.grid.n];
    PathSampler ps(c.model, cfg.grid, so, c.threads);
    c.line("model", c.model.id());
    c.line("route", route_name(ps.route()));
    c.line("paths x grid", std::to_string(b.m) + " x " + std::to_string(cfg.grid.n + 1));
    c.line("mean square at window end", g6(s2 / b.m));
    c.line("model variance there",
           g6(incremental_variance(c.model, cfg.grid.t0, cfg.grid.t0 + cfg.grid.delta)));
}

// ---------------------------------------------------------------- check-conditions

void cmd_check_conditions(Ctx& c) {
    const auto& cfg = c.cfg;
    const double H1 = env_H1(cfg), H2 = env_H2(cfg);
    CsvTable t({"check", "claimed", "holds", "value", "aux1", "aux2"});
    QuasiHelixCertificate env = verify_a1_a2(c.model, cfg.cond_grid, H1, H2, c.threads);
    t.cell("envelope").cell(true).cell(env.pass).cell(env.C1_fit).cell(env.C2_fit).cell(env.max_variance);
    t.end_row();
    QuasiHelixCertificate sg = verify_sign_condition(c.model, cfg.cond_grid, cfg.cond_sign, cfg.cond_t0, 1e-10, c.threads);
    t.cell(std::string("sign-") + sign_name(cfg.cond_sign)).cell(true).cell(sg.pass).cell(sg.max_sign_violation)
        .cell(sg.max_variance).cell(cfg.cond_t0);
    t.end_row();
    bool prop = sign_proposition_holds(cfg.cond_sign, H1);
    t.cell("sign-exponent-consistency").cell(H1 == H2).cell(prop).cell(H1).cell(H2).cell(0.0);
    t.end_row();
    c.line("model", c.model.id());
    c.line("envelope (H1, H2)", g6(H1) + ", " + g6(H2) + (env.pass ? "  pass" : "  FAIL"));
    c.line("fitted C1, C2", g6(env.C1_fit) + ", " + g6(env.C2_fit));
    c.line(std::string("sign ") + sign_name(cfg.cond_sign),
           std::string(sg.pass ? "pass" : "FAIL") + "  max violation " + g6(sg.max_sign_violation));
    if (2.0 * H1 - 1.0 > 0.0 && 2.0 * H1 - 1.0 < H2 && H2 <= H1) {
        double r0 = rho_zero(H1, H2);
        t.cell("rho0").cell(true).cell(same_regularity_check(H1, H2)).cell(r0).cell(0.0).cell(0.0);
        t.end_row();
        c.line("rho0 (closed form)", g6(r0));
    }
    const Kernel* k = nullptr;
    if (auto* vw = std::get_if<VolterraWiener>(&c.model.variant())) k = &vw->kernel;
    if (auto* vf = std::get_if<VolterraFBM>(&c.model.variant())) k = &vf->kernel;
    if (k) {
        ConditionReport rep = kernel_condition_report(*k, cfg.cond_grid);
        for (const auto& [name, r] : rep) {
            t.cell("kernel-" + name).cell(r.claimed).cell(r.holds).cell(r.margin).cell(r.witness_t).cell(r.witness_s);
            t.end_row();
            if (r.claimed) c.line("kernel " + name, std::string(r.holds ? "holds" : "FAILS") + "  margin " + g6(r.margin));
        }
        c.flags.push_back("kernel-to-process exponent labels: only fitted envelope exponents of the induced process "
                          "are reported; the declared kernel exponents are not mapped to (H1, H2)");
    }
    c.emit(t, "conditions.csv");
}

// ---------------------------------------------------------------- smallball

void cmd_smallball(Ctx& c) {
    const auto& cfg = c.cfg;
    HelixInput helix = cfg.helix;
    if (!cfg.helix_given) {
        const double H = default_H(cfg);
        helix.H1 = helix.H2 = H;
        helix.sign = H >= 0.5 ? Sign::positive : Sign::negative;
        QuasiHelixCertificate env = verify_a1_a2(c.model, std::max(8, cfg.certify_grid), H, H, c.threads);
        if (!env.pass) throw DomainError("model is not a quasi-helix with H1 = H2 = " + g6(H) + "; set smallball.H1/H2");
        helix.C1 = env.C1_fit;
        helix.C2 = env.C2_fit;
    }
    VerifyOptions vo;
    vo.mc.n_grid = cfg.grid.n;
    vo.mc.m_paths = cfg.m_paths;
    vo.mc.rng = RngSpec{cfg.seed, 0};
    vo.mc.threads = c.threads;
    vo.mc.estimator = cfg.estimator;
    vo.mc.sampler.route = cfg.route;
    vo.t0 = cfg.grid.t0;
    vo.certify_grid = cfg.certify_grid;
    SmallBallReport rep = verify_bound(c.model, helix, cfg.eps_list, cfg.delta_list, vo);

    CsvTable t({"eps", "delta", "kind", "mc_estimate", "mc_halfwidth", "bound", "pass"});
    int fails = 0;
    for (const SmallBallRow& r : rep.rows) {
        t.cell(r.eps).cell(r.delta).cell(stat_name(r.kind)).cell(r.mc_estimate).cell(r.mc_halfwidth).cell(r.bound)
            .cell(r.pass);
        t.end_row();
        fails += !r.pass;
    }
    c.emit(t, "smallball_report.csv");

    const SmallBallConstants& k = rep.derived.constants;
    const SmallBallExponents& e = rep.derived.exponents;
    SmallBallExponents ea = anchored_exponents(e);
    CsvTable kc({"name", "value"});
    auto put = [&](const char* n, double v) {
        kc.cell(n).cell(v);
        kc.end_row();
    };
    put("C1", helix.C1);
    put("C2", helix.C2);
    put("H1", helix.H1);
    put("H2", helix.H2);
    put("C0", k.C0);
    put("C3", k.C3);
    put("C4", k.C4);
    put("C5", k.C5);
    put("lambda", e.lambda);
    put("mu", e.mu);
    put("K1", e.K1);
    put("K2", e.K2);
    put("K2_anchored", ea.K2);
    put("n_grid", rep.n_grid);
    put("m_paths", static_cast<double>(cfg.m_paths));
    c.emit(kc, "smallball_constants.csv");

    c.flags.push_back("small-ball constants C3, C4, C5 follow from the chaining mesh a = C0^{1/(2H1)} eps^{1/H1}; "
                      "the printed displays differ");
    c.flags.push_back("eps-exponent uses lambda = (2H2+2)/H1 - 4 (positive case); the simplified printed form "
                      "drops the 1/H1 factor");
    c.line("model", c.model.id());
    c.line("helix (C1, C2, H1, H2)", g6(helix.C1) + ", " + g6(helix.C2) + ", " + g6(helix.H1) + ", " + g6(helix.H2));
    c.line("lambda, mu", g6(e.lambda) + ", " + g6(e.mu));
    c.line("C3 (bound is 1 above C3 d^H1)", g6(k.C3));
    c.line("estimator", estimator_name(cfg.estimator));
    c.line("rows / failing", std::to_string(rep.rows.size()) + " / " + std::to_string(fails));
}

// ---------------------------------------------------------------- frac-check

void cmd_frac_check(Ctx& c) {
    const auto& cfg = c.cfg;
    FracParams fp{cfg.alpha};
    fp.validate();
    PathBatch b = sample_paths(c.model, cfg.grid, cfg.m_paths, RngSpec{cfg.seed, 0}, c.threads);
    const TimeGrid& g = cfg.grid;
    const double a = g.t0, e = g.t0 + g.delta;
    const char* names[] = {"one", "linear", "sine", "path"};
    constexpr int kF = 4;
    struct Row {
        double gls, rs, rs_err, norm, lambda;
        bool reliable;
    };
    std::vector<Row> rows(b.m * kF);
    parallel_for(b.m, c.threads, [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t j = lo; j < hi; ++j) {
            GridFunction X = GridFunction::from_path(g, b.row(j), cfg.frac_hint);
            LambdaResult lam = lambda_alpha(X, cfg.alpha);
            GridFunction fs[kF] = {
                GridFunction::from_function(g, [](double) { return 1.0; }),
                GridFunction::from_function(g, [](double u) { return u; }),
                GridFunction::from_function(g, [](double u) { return std::sin(2.0 * M_PI * u); }),
                X,
            };
            for (int q = 0; q < kF; ++q) {
                Row& r = rows[j * kF + q];
                r.gls = gls_integral(fs[q], X, a, e, cfg.alpha);
                RsResult rs = rs_oracle(fs[q], X, a, e);
                r.rs = rs.value;
                r.rs_err = rs.error;
                r.reliable = rs.reliable;
                r.norm = alpha_norm(fs[q], a, e, cfg.alpha);
                r.lambda = lam.value;
            }
        }
    });
    CsvTable t({"path", "integrand", "gls", "rs", "rs_error", "alpha_norm", "lambda_alpha", "bound", "holds"});
    int viol = 0;
    double worst = 0.0;
    for (std::size_t j = 0; j < b.m; ++j)
        for (int q = 0; q < kF; ++q) {
            const Row& r = rows[j * kF + q];
            double bound = r.lambda * r.norm;
            bool holds = std::fabs(r.gls) <= bound;
            viol += !holds;
            if (r.reliable) worst = std::max(worst, std::fabs(r.gls - r.rs));
            t.cell(j).cell(names[q]).cell(r.gls).cell(r.rs).cell(r.rs_err).cell(r.norm).cell(r.lambda).cell(bound)
                .cell(holds);
            t.end_row();
        }
    c.emit(t, "frac_check.csv");
    c.line("model", c.model.id());
    c.line("alpha", g6(cfg.alpha));
    c.line("paths x integrands", std::to_string(b.m) + " x " + std::to_string(kF));
    c.line("bound violations", std::to_string(viol));
    c.line("max |gls - rs| (reliable)", g6(worst));
}

// ---------------------------------------------------------------- replicate

void cmd_replicate(Ctx& c) {
    const auto& cfg = c.cfg;
    if (cfg.grid.t0 != 0.0 || cfg.grid.delta != 1.0) throw DomainError("replicate needs grid.t0 = 0 and grid.delta = 1");
    const double H1 = env_H1(cfg), H2 = env_H2(cfg);
    ReplicationParams p = select_parameters(H1, H2, cfg.rho);
    BlockSchedule sched = make_schedule(cfg.schedule, cfg.N_blocks, p.gamma);
    PathSampler sampler(c.model, cfg.grid, SamplerOptions{cfg.route}, c.threads);
    const int N = cfg.N_blocks;

    struct Out {
        std::string trace;
        double terminal_error;
        int failed, case1, last_case1, case1_after6;
        bool tail_decreasing;
    };
    std::vector<Out> outs(cfg.m_paths);
    ReplicationOptions ro{cfg.trigger};
    for_each_path(sampler, cfg.m_paths, RngSpec{cfg.seed, 0}, c.threads,
                  [&](std::size_t j, const double* path, unsigned) {
                      GridFunction X = GridFunction::from_path(cfg.grid, path, H2);
                      GridFunction Z = X;
                      Z.holder_hint = cfg.rho;
                      for (double& v : Z.values)
                          v = cfg.target == TargetKind::zero ? 0.0
                              : cfg.target == TargetKind::constant ? cfg.target_value
                                                                   : cfg.target_value * v;
                      ReplicationTrace tr = run_replication(X, Z, p, sched, ro);
                      TraceDiagnostics d = trace_diagnostics(tr, p.alpha);
                      CsvTable t({"n", "case", "tau_index", "block_target", "achieved", "V_at_tn", "Z_at_tn_minus_1",
                                  "alpha_norm_tail"});
                      for (int n = 1; n <= N; ++n) {
                          const int in = tr.t_index[n], ip = tr.t_index[n - 1];
                          t.cell(n);
                          if (n < N) {
                              const BlockRecord& r = tr.blocks[n - 1];
                              t.cell(case_name(r.kase)).cell(r.tau_index).cell(r.target).cell(r.achieved);
                          } else {
                              t.cell("terminal").cell(in).cell(Z.values[ip]).cell(tr.V.values[in] - tr.V.values[ip]);
                          }
                          t.cell(tr.V.values[in]).cell(Z.values[ip]).cell(d.alpha_tail[n - 1]);
                          t.end_row();
                      }
                      Out& o = outs[j];
                      o.trace = t.str();
                      o.terminal_error = tr.terminal_error;
                      o.failed = tr.failed_blocks;
                      o.case1 = 0;
                      for (const BlockRecord& r : tr.blocks) o.case1 += r.kase == BlockCase::caught_up;
                      o.last_case1 = d.last_case1;
                      o.case1_after6 = N > 6 ? d.case1_after[5] : 0;
                      o.tail_decreasing = d.tail_decreasing;
                  });

    CsvTable s({"path", "terminal_error", "failed_blocks", "case1_blocks", "last_case1", "case1_after_6",
                "tail_decreasing"});
    std::vector<double> errs;
    int dec = 0, late = 0, failed = 0;
    for (std::size_t j = 0; j < outs.size(); ++j) {
        const Out& o = outs[j];
        char name[32];
        std::snprintf(name, sizeof name, "traces/trace_%05zu.csv", j);
        fs::create_directories(c.dir / "traces");
        std::ofstream os(c.dir / name, std::ios::binary);
        os << o.trace;
        if (!os) throw NumericError(std::string("write failed: ") + name);
        c.outputs.push_back(name);
        s.cell(j).cell(o.terminal_error).cell(o.failed).cell(o.case1).cell(o.last_case1).cell(o.case1_after6)
            .cell(o.tail_decreasing);
        s.end_row();
        errs.push_back(o.terminal_error);
        dec += o.tail_decreasing;
        late += o.case1_after6 > 0;
        failed += o.failed;
    }
    c.emit(s, "replicate_summary.csv");
    std::sort(errs.begin(), errs.end());
    double med = errs.empty() ? 0.0
                 : errs.size() % 2 ? errs[errs.size() / 2]
                                   : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
    const double M = static_cast<double>(outs.size());
    c.flags.push_back("rho0: closed form " + g6(p.rho0_display) + " vs mu/(lambda theta) - 1 = " + g6(p.rho0_theta) +
                      " at theta " + g6(p.theta) + "; rho clears " +
                      (p.clears_display && p.clears_theta ? "both" : p.clears_display ? "closed form only" : "theta form only"));
    c.flags.push_back(std::string("case-2 trigger: ") + trigger_name(cfg.trigger));
    c.line("model", c.model.id());
    c.line("theta, alpha, kappa", g6(p.theta) + ", " + g6(p.alpha) + ", " + g6(p.kappa));
    c.line("schedule", std::string(schedule_name(cfg.schedule)) + " N=" + std::to_string(N));
    c.line("median terminal error", g6(med));
    c.line("tail decreasing", pct(dec / M));
    c.line("case-1 after n=6", pct(late / M));
    c.line("failed blocks (total)", std::to_string(failed));
}

// ---------------------------------------------------------------- lemma-divergence

void cmd_lemma(Ctx& c) {
    const auto& cfg = c.cfg;
    const double H1 = env_H1(cfg), H2 = env_H2(cfg);
    SmallBall sb = derive_constants(HelixInput{1.0, 1.0, H1, H2, H1 >= 0.5 ? Sign::positive : Sign::negative});
    const SmallBallExponents& e = sb.exponents;
    const double theta = cfg.lemma_theta.value_or(e.mu / e.lambda - 0.01);
    LemmaParams lp = lemma_defaults(e, theta);
    if (cfg.lemma_beta) lp.beta = *cfg.lemma_beta;
    if (cfg.lemma_gamma) lp.gamma = *cfg.lemma_gamma;
    else if (cfg.lemma_beta) lp.gamma = 0.5 * (1.0 + std::min(1.0 / theta, lp.beta * e.lambda / e.mu));
    std::vector<std::string> bad = lemma_violations(lp);
    if (!bad.empty()) {
        std::string msg = "infeasible lemma parameters:";
        for (auto& s : bad) msg += " " + s + ";";
        throw DomainError(msg);
    }
    BlockSchedule sched = make_schedule(ScheduleKind::power, cfg.lemma_blocks, lp.gamma);
    PathSampler sampler(c.model, cfg.grid, SamplerOptions{cfg.route}, c.threads);
    std::vector<DivergenceResult> res(cfg.m_paths);
    for_each_path(sampler, cfg.m_paths, RngSpec{cfg.seed, 0}, c.threads,
                  [&](std::size_t j, const double* path, unsigned) {
                      res[j] = run_diverging_integrand(path, cfg.grid, lp, sched, cfg.level_M);
                  });
    CsvTable t({"path", "hit", "hit_block", "cumulative", "clipped_cumulative", "clipped_hit", "successes"});
    const int K = cfg.lemma_blocks;
    std::vector<double> rate(K, 0.0), mean(K, 0.0);
    int hits = 0, chits = 0;
    for (std::size_t j = 0; j < res.size(); ++j) {
        const DivergenceResult& r = res[j];
        int succ = 0;
        for (int k = 0; k < K; ++k) {
            succ += r.success[k];
            rate[k] += r.success[k];
            mean[k] += r.contributions[k];
        }
        hits += r.hit;
        chits += r.clipped_hit;
        t.cell(j).cell(r.hit).cell(r.hit_block).cell(r.cumulative).cell(r.clipped_cumulative).cell(r.clipped_hit)
            .cell(succ);
        t.end_row();
    }
    c.emit(t, "lemma_divergence.csv");
    const double M = static_cast<double>(res.size());
    CsvTable bt({"block", "t_start", "t_end", "success_rate", "mean_contribution"});
    for (int k = 0; k < K; ++k) {
        bt.cell(k + 1).cell(cfg.grid.t0 + cfg.grid.delta * sched.t[k]).cell(cfg.grid.t0 + cfg.grid.delta * sched.t[k + 1])
            .cell(rate[k] / M).cell(mean[k] / M);
        bt.end_row();
    }
    c.emit(bt, "lemma_blocks.csv");
    double late = 0.0;
    int nl = 0;
    for (int k = 9; k < K; ++k, ++nl) late += rate[k] / M;
    c.line("model", c.model.id());
    c.line("beta, gamma, theta", g6(lp.beta) + ", " + g6(lp.gamma) + ", " + g6(theta));
    c.line("level M", g6(cfg.level_M));
    c.line("hit fraction", pct(hits / M));
    c.line("hit fraction (clipped)", pct(chits / M));
    if (nl > 0) c.line("success rate, k >= 10", pct(late / nl));
}

fs::path unique_dir(const fs::path& root, Command cmd, std::uint64_t seed) {
    auto now = std::chrono::system_clock::now();
    long long ut = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::string base = std::string(command_name(cmd)) + "-" + std::to_string(ut) + "-" + std::to_string(seed);
    fs::path p = root / base;
    for (int k = 1; fs::exists(p); ++k) p = root / (base + "-" + std::to_string(k));
    return p;
}

void write_manifest(const fs::path& dir, const json& j) {
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    os << j.dump(2) << "\n";
    if (!os) throw NumericError("cannot write manifest.json");
}

}  // namespace

RunResult run(const RunOptions& o) {
    RunResult res;
    ParseResult pr = parse_config(o.config_text);
    if (!pr.ok()) {
        res.exit_code = 1;
        for (const ConfigError& e : pr.errors) res.error += (res.error.empty() ? "" : "\n") + e.str();
        return res;
    }
    ExperimentConfig cfg = std::move(*pr.config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.resolved["mc.seed"] = std::to_string(*o.seed);
    }
    fs::path dir;
    auto t_start = std::chrono::steady_clock::now();
    json man;
    try {
        ProcessModel model = build_model(cfg.model);
        fs::create_directories(o.out_root);
        dir = unique_dir(o.out_root, o.command, cfg.seed);
        fs::create_directories(dir);
        man["command"] = command_name(o.command);
        man["version"] = kVersion;
        man["seed"] = cfg.seed;
        man["threads"] = o.threads;
        man["config_path"] = o.config_path;
        man["config"] = o.config_text;
        man["given"] = cfg.given;
        man["resolved"] = cfg.resolved;
        man["started_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                                  std::chrono::system_clock::now().time_since_epoch()).count();
        man["status"] = "running";
        write_manifest(dir, man);

        Ctx c{cfg, model, dir, o.threads, {}, {}, {}};
        switch (o.command) {
            case Command::simulate: cmd_simulate(c); break;
            case Command::check_conditions: cmd_check_conditions(c); break;
            case Command::smallball: cmd_smallball(c); break;
            case Command::frac_check: cmd_frac_check(c); break;
            case Command::replicate: cmd_replicate(c); break;
            case Command::lemma_divergence: cmd_lemma(c); break;
        }
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        man["status"] = "ok";
        man["wall_clock_seconds"] = wall;
        man["outputs"] = c.outputs;
        man["flags"] = c.flags;
        write_manifest(dir, man);
        res.dir = dir;
        res.outputs = c.outputs;
        res.flags = c.flags;
        res.summary = c.summary;
    } catch (const NumericError& e) {
        res.exit_code = 2;
        res.error = e.what();
    } catch (const DomainError& e) {
        res.exit_code = 1;
        res.error = e.what();
    } catch (const std::invalid_argument& e) {
        res.exit_code = 1;
        res.error = e.what();
    } catch (const std::exception& e) {
        res.exit_code = 2;
        res.error = e.what();
    }
    if (res.exit_code != 0 && !dir.empty()) {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    if (o.print_summary) {
        std::cout << command_name(o.command) << " (seed " << cfg.seed << ", threads " << o.threads << ")\n";
        if (res.exit_code == 0) {
            for (const auto& l : res.summary) std::cout << l << "\n";
            for (const auto& f : res.flags) std::cout << "  flag: " << f << "\n";
            std::cout << "  output: " << res.dir.string() << "\n";
        }
    }
    return res;
}

}  // namespace qhlab
