// Command-line front end: closed-form roots and values, boundary tables,
// path simulation with payoff estimates, and the Monte Carlo verification
// harness. Exit codes: 0 ok, 1 verification failure, 2 usage/config error.

#include <CLI11.hpp>

#include "stopgame/config.hpp"
#include "stopgame/csv.hpp"
#include "stopgame/sim.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace sg = stopgame;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    std::optional<double> mu, sigma, r, x0, k1, l1, k2, l2, p1, p2, dt, horizon;
    std::optional<std::uint64_t> seed, paths;
    std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file (key=value lines, # comments)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--quiet", o.quiet, "suppress the summary lines");
    cmd->add_option("--mu", o.mu);
    cmd->add_option("--sigma", o.sigma);
    cmd->add_option("--r", o.r);
    cmd->add_option("--x0", o.x0);
    cmd->add_option("--k1", o.k1);
    cmd->add_option("--l1", o.l1, "consolation strike for player 1 (0 = none)");
    cmd->add_option("--k2", o.k2);
    cmd->add_option("--l2", o.l2);
    cmd->add_option("--p1", o.p1);
    cmd->add_option("--p2", o.p2);
    cmd->add_option("--dt", o.dt);
    cmd->add_option("--horizon", o.horizon);
    cmd->add_option("--seed", o.seed);
    cmd->add_option("--paths", o.paths);
    cmd->add_option("--mode", o.mode, "martingale | ode | asym");
}

sg::RunConfig resolve(const CommonOpts& o) {
    sg::RunConfig c;
    if (!o.config_path.empty()) c = sg::parse_config_file(o.config_path);
    if (o.mu) c.mu = *o.mu;
    if (o.sigma) c.sigma = *o.sigma;
    if (o.r) c.r = *o.r;
    if (o.x0) c.x0 = *o.x0;
    if (o.k1) c.k1 = *o.k1;
    if (o.l1) c.l1 = *o.l1;
    if (o.k2) c.k2 = *o.k2;
    if (o.l2) c.l2 = *o.l2;
    if (o.p1) c.p1 = *o.p1;
    if (o.p2) c.p2 = *o.p2;
    if (o.dt) c.dt = *o.dt;
    if (o.horizon) c.horizon = *o.horizon;
    if (o.seed) c.seed = *o.seed;
    if (o.paths) c.paths = *o.paths;
    if (o.mode) c.mode = *o.mode;
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    return c;
}

std::string out_path(const sg::RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string run_id(const sg::RunConfig& cfg) {
    return cfg.mode + ":x0=" + sg::csv::format(cfg.x0) + ":p1=" + sg::csv::format(cfg.p1);
}

int cmd_roots(double mu, double sigma, double r) {
    const sg::ModelParams p = sg::validate(mu, sigma, r);
    const sg::Roots roots = sg::characteristic_roots(p);
    std::cout << "gamma=" << sg::csv::format(roots.gamma) << "\n"
              << "eta=" << sg::csv::format(roots.eta) << "\n";
    return 0;
}

int cmd_value(double mu, double sigma, double r, const std::string& kind, double strike,
              std::optional<double> x) {
    const sg::ModelParams p = sg::validate(mu, sigma, r);
    sg::ValueFunction vf;
    if (kind == "call") vf = sg::call_value(p, strike);
    else if (kind == "put") vf = sg::put_value(p, strike);
    else throw sg::Error(sg::Errc::bad_config, "kind must be call or put");
    std::cout << "threshold=" << sg::csv::format(vf.threshold) << "\n"
              << "coefficient=" << sg::csv::format(vf.coefficient) << "\n";
    if (x) std::cout << "value=" << sg::csv::format(vf(*x)) << "\n";
    return 0;
}

int cmd_boundary(const CommonOpts& o) {
    const sg::RunConfig cfg = resolve(o);
    const sg::Solution sol = sg::solve(cfg.to_game(), cfg.boundary_mode());
    const auto& b = sol.boundary();
    const double lo = cfg.x_min > 0.0 ? cfg.x_min : 0.8 * b.touch_a();
    const double hi = cfg.x_max > 0.0 ? cfg.x_max : 1.05 * b.upper_bg();
    const std::size_t npts = std::max<std::uint64_t>(cfg.x_points, 2);

    sg::csv::Writer bw(out_path(cfg, "boundary.csv"), {"x", "b"});
    sg::csv::Writer vw(out_path(cfg, "values.csv"), {"x", "u1", "u2"});
    for (std::size_t i = 0; i < npts; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(npts - 1);
        bw.row({sg::csv::format(x), sg::csv::format(b(x))});
        vw.row({sg::csv::format(x), sg::csv::format(sol.values.u1(x, cfg.p1)),
                sg::csv::format(sol.values.u2(x, cfg.p1))});
    }
    if (!o.quiet)
        std::cout << "a=" << sg::csv::format(b.touch_a())
                  << " b_g=" << sg::csv::format(b.upper_bg()) << "\n";
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    const sg::RunConfig cfg = resolve(o);
    const sg::Solution sol = sg::solve(cfg.to_game(), cfg.boundary_mode());
    const sg::PathSet ps(sol.game.params, cfg.x0,
                         sg::SimConfig{cfg.dt, cfg.horizon, cfg.paths, cfg.seed});

    // sample path for plotting the reflected pair (Pi^1, X)
    std::vector<double> xs(ps.n_steps() + 1);
    ps.states(0, xs);
    std::size_t hit1 = sg::kNever, hit2 = sg::kNever;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (hit2 == sg::kNever && xs[k] >= sol.stop_level_2) hit2 = k;
        if (xs[k] >= sol.stop_level_1) {
            hit1 = k;
            break;
        }
    }
    const sg::HoldRule hold{hit2, hit1, sol.stop_level_2};
    const auto g2 = sg::gamma2_from_boundary(xs, sol.boundary(), cfg.p1,
                                             sol.mode == sg::BoundaryMode::asym ? &hold : nullptr);
    sg::ControlPath g1;
    if (sol.mode == sg::BoundaryMode::asym)
        g1 = sg::gamma1_asym(xs, g2, sol.values, cfg.p1, cfg.p2, hit2);
    else
        g1 = sg::gamma1_sym(g2, cfg.x0, sol.boundary(), cfg.p1, cfg.p2, hit1, sol.mode);
    const auto pi1 = sg::belief_path(cfg.p1, g2);

    sg::csv::Writer pw(out_path(cfg, "path.csv"), {"t", "X", "Pi1", "Gamma1", "Gamma2"});
    for (std::size_t k = 0; k < xs.size(); ++k)
        pw.row({sg::csv::format(static_cast<double>(k) * cfg.dt), sg::csv::format(xs[k]),
                sg::csv::format(pi1.values[k]), sg::csv::format(g1.values[k]),
                sg::csv::format(g2.values[k])});

    const sg::GameEstimates est = sg::estimate_game(sol, ps);
    sg::csv::Writer ew(out_path(cfg, "estimates.csv"),
                       {"config", "player", "estimator", "mean", "se"});
    const auto emit = [&](int player, const char* mode_name, const sg::McEstimate& e) {
        ew.row({run_id(cfg), std::to_string(player), mode_name, sg::csv::format(e.mean),
                sg::csv::format(e.std_error)});
    };
    emit(1, "indicator", est.j1_indicator);
    emit(2, "indicator", est.j2_indicator);
    emit(1, "formula", est.j1_formula);
    emit(2, "formula", est.j2_formula);
    if (!o.quiet) {
        std::printf("J1 indicator %.6g (se %.2g)  formula %.6g (se %.2g)  [u1=%.6g]\n",
                    est.j1_indicator.mean, est.j1_indicator.std_error, est.j1_formula.mean,
                    est.j1_formula.std_error, sol.m1_0());
        std::printf("J2 indicator %.6g (se %.2g)  formula %.6g (se %.2g)  [u2=%.6g]\n",
                    est.j2_indicator.mean, est.j2_indicator.std_error, est.j2_formula.mean,
                    est.j2_formula.std_error, sol.m2_0());
    }
    return 0;
}

int cmd_verify(const CommonOpts& o, double perturb_u1) {
    const sg::RunConfig cfg = resolve(o);
    const sg::Solution sol = sg::solve(cfg.to_game(), cfg.boundary_mode());

    const auto run_once = [&](std::uint64_t n_paths) {
        const sg::PathSet ps(sol.game.params, cfg.x0,
                             sg::SimConfig{cfg.dt, cfg.horizon, n_paths, cfg.seed});
        std::vector<double> cps;
        for (double f : {0.125, 0.25, 0.5, 0.75, 1.0}) cps.push_back(f * cfg.horizon);
        sg::DiagOptions dopt;
        dopt.u1_scale = perturb_u1;
        sg::DiagnosticsReport diag = sg::martingale_diagnostic(sol, ps, cps, dopt);
        const auto devs = sg::default_deviations(sol);
        for (int player : {1, 2}) {
            const auto dr = sg::deviation_test(player, sol, ps, devs);
            diag.deviations.insert(diag.deviations.end(), dr.deviations.begin(),
                                   dr.deviations.end());
            diag.pass = diag.pass && dr.pass;
        }
        return diag;
    };

    sg::DiagnosticsReport rep = run_once(cfg.paths);
    if (!rep.pass) {
        if (!o.quiet) std::cout << "marginal failure, re-running once with 4x paths\n";
        rep = run_once(cfg.paths * 4);
    }

    sg::csv::Writer dw(out_path(cfg, "diagnostics.csv"),
                       {"process", "t", "stopped_mean", "stopped_se", "unstopped_mean",
                        "unstopped_se", "m0", "verdict"});
    for (const auto& row : rep.checkpoints) {
        const bool ok = row.martingale_ok && row.supermartingale_ok && row.monotone_ok;
        dw.row({"M" + std::to_string(row.which), sg::csv::format(row.t),
                sg::csv::format(row.stopped_mean), sg::csv::format(row.stopped_se),
                sg::csv::format(row.unstopped_mean), sg::csv::format(row.unstopped_se),
                sg::csv::format(row.m0), ok ? "pass" : "fail"});
    }
    sg::csv::Writer vw(out_path(cfg, "deviations.csv"),
                       {"deviation", "player", "estimate", "se", "equilibrium", "margin",
                        "verdict"});
    for (const auto& row : rep.deviations)
        vw.row({row.id, std::to_string(row.player), sg::csv::format(row.estimate),
                sg::csv::format(row.std_error), sg::csv::format(row.equilibrium),
                sg::csv::format(row.margin), row.ok ? "pass" : "fail"});

    if (!o.quiet) std::cout << (rep.pass ? "verify: pass\n" : "verify: FAIL\n");
    return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Preemption stopping games under uncertain competition: "
                 "equilibrium construction and Monte Carlo verification"};
    app.require_subcommand(1);

    auto* roots = app.add_subcommand("roots", "characteristic exponents gamma and eta");
    double r_mu{}, r_sigma{}, r_r{};
    roots->add_option("--mu", r_mu)->required();
    roots->add_option("--sigma", r_sigma)->required();
    roots->add_option("--r", r_r)->required();

    auto* value = app.add_subcommand("value", "single-player closed-form value");
    double v_mu{}, v_sigma{}, v_r{}, v_strike{};
    std::string v_kind{"call"};
    std::optional<double> v_x;
    value->add_option("--mu", v_mu)->required();
    value->add_option("--sigma", v_sigma)->required();
    value->add_option("--r", v_r)->required();
    value->add_option("--kind", v_kind, "call | put");
    value->add_option("--strike", v_strike)->required();
    value->add_option("--x", v_x, "evaluate the value at x");

    auto* boundary = app.add_subcommand("boundary", "equilibrium boundary and value tables");
    CommonOpts b_opts;
    add_common(boundary, b_opts);

    auto* simulate = app.add_subcommand("simulate", "sample path CSV and payoff estimates");
    CommonOpts s_opts;
    add_common(simulate, s_opts);

    auto* verify = app.add_subcommand("verify", "martingale diagnostics and deviation tests");
    CommonOpts y_opts;
    double perturb_u1 = 1.0;
    add_common(verify, y_opts);
    verify->add_option("--perturb-u1", perturb_u1,
                       "scale u1 inside the M processes (negative control)")
        ->group(""); // hidden

    try {
        app.parse(argc, argv);
        if (roots->parsed()) return cmd_roots(r_mu, r_sigma, r_r);
        if (value->parsed()) return cmd_value(v_mu, v_sigma, v_r, v_kind, v_strike, v_x);
        if (boundary->parsed()) return cmd_boundary(b_opts);
        if (simulate->parsed()) return cmd_simulate(s_opts);
        if (verify->parsed()) return cmd_verify(y_opts, perturb_u1);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" ? 0 : 2;
    } catch (const sg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
