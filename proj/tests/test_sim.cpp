#include "stopgame/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace stopgame;

namespace {

const ModelParams kWorked = validate(0.0, std::sqrt(2.0), 2.0);
const ModelParams kFigure1 = validate(0.08, 0.01, 0.1);

Solution worked_solution(double x0, double p1, double p2) {
    const PlayerSpec pl1{call_payoff(3.0), call_payoff(4.0), p1};
    const PlayerSpec pl2{call_payoff(3.0), call_payoff(4.0), p2};
    return solve(make_game(kWorked, x0, pl1, pl2), BoundaryMode::martingale);
}

} // namespace

TEST_CASE("path generation is deterministic for a fixed seed") {
    const PathSet a(kWorked, 5.0, SimConfig{1e-2, 1.0, 4, 777});
    const PathSet b(kWorked, 5.0, SimConfig{1e-2, 1.0, 4, 777});
    std::vector<double> xa(a.n_steps() + 1), xb(b.n_steps() + 1);
    for (std::size_t i = 0; i < 4; ++i) {
        a.states(i, xa);
        b.states(i, xb);
        CHECK(xa == xb);
        a.states(i, xb); // same object, re-materialized
        CHECK(xa == xb);
        for (double v : xa) CHECK(v > 0.0);
        CHECK(xa[0] == 5.0);
    }
}

TEST_CASE("degenerate noise tracks the deterministic exponential") {
    const ModelParams p = validate(0.05, 0.001, 0.1);
    const PathSet ps(p, 2.0, SimConfig{1e-2, 1.0, 16, 99});
    std::vector<double> xs(ps.n_steps() + 1);
    for (std::size_t i = 0; i < ps.n_paths(); ++i) {
        ps.states(i, xs);
        for (std::size_t k = 0; k <= ps.n_steps(); ++k) {
            const double ref = 2.0 * std::exp(0.05 * static_cast<double>(k) * ps.dt());
            CHECK(std::abs(xs[k] - ref) <= 0.01 * ref);
        }
    }
}

TEST_CASE("terminal mean matches the lognormal moment") {
    const std::size_t n = 20000;
    const PathSet ps(kFigure1, 10.0, SimConfig{1e-2, 1.0, n, 4242});
    std::vector<double> xs(ps.n_steps() + 1), ends(n);
    for (std::size_t i = 0; i < n; ++i) {
        ps.states(i, xs);
        ends[i] = xs.back();
    }
    const McEstimate e = reduce_samples(ends, Estimator::formula);
    CHECK(std::abs(e.mean - 10.0 * std::exp(0.08)) <= 4.0 * e.std_error);
}

TEST_CASE("path set rejects malformed grids") {
    CHECK_THROWS_AS(PathSet(kWorked, 5.0, SimConfig{1e-2, 0.055, 4, 1}), Error); // not a multiple
    CHECK_THROWS_AS(PathSet(kWorked, 5.0, SimConfig{1e-8, 100.0, 4, 1}), Error); // step cap
    CHECK_THROWS_AS(PathSet(kWorked, -1.0, SimConfig{1e-2, 1.0, 4, 1}), Error);
    CHECK_THROWS_AS(PathSet(kWorked, 5.0, SimConfig{1e-2, 1.0, 0, 1}), Error);
}

TEST_CASE("horizon verification") {
    // short horizon, sub-99% hitting, heavy tail bound -> error
    const PathSet bad(kWorked, 5.0, SimConfig{1e-2, 0.5, 200, 5});
    CHECK_THROWS_AS(bad.verify_horizon(6.0, 1e-4), Error);
    // a long horizon passes via the tail bound even with misses
    const PathSet ok(kWorked, 5.0, SimConfig{1e-2, 8.0, 200, 5});
    CHECK_NOTHROW(ok.verify_horizon(6.0, 1e-3));
}

TEST_CASE("simultaneous stop pays g2 to player 2 and the consolation to player 1") {
    const Solution sol = worked_solution(5.0, 0.3, 0.5);
    const std::vector<double> path{5.0, 5.2, 5.4};
    const double dt = 0.25;
    const IndicatorOutcome io = indicator_payoffs(sol, path, dt, 1, 1, true, true);
    const double d = std::exp(-kWorked.r * dt);
    CHECK(io.j2 == d * (5.2 - 3.0));
    CHECK(io.j1 == d * sol.values.vh1()(5.2));
    // both never stop: zero payoff by convention
    const IndicatorOutcome never = indicator_payoffs(sol, path, dt, kNever, kNever, true, true);
    CHECK(never.j1 == 0.0);
    CHECK(never.j2 == 0.0);
    // inactive competition: player 1 alone
    const IndicatorOutcome solo = indicator_payoffs(sol, path, dt, 2, 1, false, true);
    CHECK(solo.j1 == d * d * (5.4 - 3.0));
}

TEST_CASE("immediate stop with initial control mass is exact") {
    // b(5) = 0.16 < p1: Gamma^2 charges q at t=0 and
    // J1(tau=0) = (1 - p1 q) g1(x0) + p1 q V^{h1}(x0) with no noise
    const Solution sol = worked_solution(5.0, 0.3, 0.5);
    const PathSet ps(kWorked, 5.0, SimConfig{1e-2, 2.0, 16, 31});
    const std::vector<DeviationSpec> devs{{DeviationSpec::Kind::immediate, 0.0}};
    const DiagnosticsReport rep = deviation_test(1, sol, ps, devs);
    REQUIRE(rep.deviations.size() == 1);
    const double q = (0.3 - 0.16) / (0.3 * (1.0 - 0.16));
    const double expect = (1.0 - 0.3 * q) * 2.0 + 0.3 * q * sol.values.vh1()(5.0);
    CHECK(rep.deviations[0].estimate == doctest::Approx(expect).epsilon(1e-9));
    CHECK(rep.deviations[0].ok); // stopping at once is never an improvement
}

TEST_CASE("negligible competition reduces to the single-player value") {
    const PlayerSpec pl1{call_payoff(3.0), call_payoff(4.0), 1e-9};
    const PlayerSpec pl2{call_payoff(3.0), call_payoff(4.0), 0.5};
    const Solution sol = solve(make_game(kWorked, 4.6, pl1, pl2), BoundaryMode::martingale);
    const PathSet ps(kWorked, 4.6, SimConfig{2e-3, 6.0, 20000, 611});
    // stopping at the single-player threshold b_g recovers V^g(x0)
    const std::vector<DeviationSpec> devs{{DeviationSpec::Kind::threshold, 6.0}};
    const DiagnosticsReport rep = deviation_test(1, sol, ps, devs);
    const double vg = sol.values.vg1()(4.6);
    CHECK(std::abs(rep.deviations[0].estimate - vg) <=
          3.0 * rep.deviations[0].std_error + 2e-3);
}

TEST_CASE("indicator and formula estimators agree") {
    const Solution sol = worked_solution(4.6, 0.12, 0.5);
    const PathSet ps(kWorked, 4.6, SimConfig{2e-3, 6.0, 20000, 2024});
    const GameEstimates est = estimate_game(sol, ps);
    const auto close = [](const McEstimate& a, const McEstimate& b) {
        return std::abs(a.mean - b.mean) <=
               3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    };
    CHECK(close(est.j1_indicator, est.j1_formula));
    CHECK(close(est.j2_indicator, est.j2_formula));
    // discounted-value sanity: estimates live in [0, V^{g_i}(x0)] + 3 SE
    for (const McEstimate* e : {&est.j1_indicator, &est.j1_formula}) {
        CHECK(e->mean >= -3.0 * e->std_error);
        CHECK(e->mean <= sol.values.vg1()(4.6) + 3.0 * e->std_error);
    }
    // support condition: control increases only where u2 = g2
    CHECK(est.support_violation_max <= 1e-3);
    // equilibrium reproduction at unit-test scale
    CHECK(std::abs(est.j1_formula.mean - sol.m1_0()) <= 4.0 * est.j1_formula.std_error);
    CHECK(std::abs(est.j2_formula.mean - sol.m2_0()) <= 4.0 * est.j2_formula.std_error);
}

TEST_CASE("estimate_J selects the requested estimator") {
    const Solution sol = worked_solution(4.6, 0.12, 0.5);
    const PathSet ps(kWorked, 4.6, SimConfig{5e-3, 4.0, 4000, 7});
    const McEstimate j1f = estimate_J(1, Estimator::formula, sol, ps);
    const GameEstimates est = estimate_game(sol, ps);
    CHECK(j1f.mean == est.j1_formula.mean);
    CHECK_THROWS_AS(estimate_J(3, Estimator::formula, sol, ps), Error);
}

TEST_CASE("results do not depend on the worker count") {
    const Solution sol = worked_solution(4.6, 0.12, 0.5);
    const PathSet ps(kWorked, 4.6, SimConfig{5e-3, 4.0, 3000, 99});
    EstimateOptions one;
    one.threads = 1;
    EstimateOptions four;
    four.threads = 4;
    const GameEstimates a = estimate_game(sol, ps, one);
    const GameEstimates b = estimate_game(sol, ps, four);
    CHECK(a.j1_formula.mean == b.j1_formula.mean);
    CHECK(a.j2_formula.mean == b.j2_formula.mean);
    CHECK(a.j1_indicator.mean == b.j1_indicator.mean);
    CHECK(a.j2_indicator.mean == b.j2_indicator.mean);
}

TEST_CASE("a fresh theta/U seed redraws the game randomization only") {
    const Solution sol = worked_solution(4.6, 0.12, 0.5);
    const PathSet ps(kWorked, 4.6, SimConfig{5e-3, 4.0, 4000, 7});
    EstimateOptions redraw;
    redraw.game_seed = 1234;
    const GameEstimates a = estimate_game(sol, ps);
    const GameEstimates b = estimate_game(sol, ps, redraw);
    CHECK(a.j1_formula.mean == b.j1_formula.mean); // same state paths
    CHECK(a.j1_indicator.mean != b.j1_indicator.mean);
    // independent draws of the same quantity still agree statistically
    CHECK(std::abs(a.j1_indicator.mean - b.j1_indicator.mean) <=
          4.0 * std::sqrt(a.j1_indicator.std_error * a.j1_indicator.std_error +
                          b.j1_indicator.std_error * b.j1_indicator.std_error));
}

TEST_CASE("build_M_path basics") {
    const Solution sol = worked_solution(4.6, 0.2, 0.5);
    // flat opponent control: M1 reduces to pure discounted evaluation of u1
    std::vector<double> path{4.6, 4.7, 4.8, 4.9};
    ControlPath zero;
    zero.values.assign(path.size(), 0.0);
    const MPath mp = build_M_path(sol, path, zero, zero, 0.1);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double expect =
            std::exp(-kWorked.r * 0.1 * static_cast<double>(k)) * sol.values.u1(path[k], 0.2);
        CHECK(mp.m1[k] == doctest::Approx(expect).epsilon(1e-13));
    }
    CHECK(mp.m1[0] == doctest::Approx(sol.values.u1(4.6, 0.2)).epsilon(1e-13));
    CHECK(mp.m2[0] == doctest::Approx(sol.values.u2(4.6, 0.2)).epsilon(1e-13));
    // constant state: M1 decays (pure discounting)
    std::vector<double> flat(40, 4.6);
    ControlPath zero40;
    zero40.values.assign(flat.size(), 0.0);
    const MPath mf = build_M_path(sol, flat, zero40, zero40, 0.1);
    for (std::size_t k = 1; k < flat.size(); ++k) CHECK(mf.m1[k] < mf.m1[k - 1]);
    CHECK_THROWS_AS(build_M_path(sol, path, zero,
                                 ControlPath{{0.0, 0.0}, kNever, 0.0, 0.0}, 0.1),
                    Error);
}

TEST_CASE("martingale diagnostic passes in equilibrium and fails the negative control") {
    const Solution sol = worked_solution(4.3, 0.45, 0.6);
    const PathSet ps(kWorked, 4.3, SimConfig{2e-3, 6.0, 20000, 909});
    const std::vector<double> cps{0.3, 0.6, 1.0, 1.5, 2.0};
    const DiagnosticsReport good = martingale_diagnostic(sol, ps, cps);
    CHECK(good.pass);
    DiagOptions broken;
    broken.u1_scale = 1.1;
    const DiagnosticsReport bad = martingale_diagnostic(sol, ps, cps, broken);
    CHECK_FALSE(bad.pass);
    // too few paths
    const PathSet tiny(kWorked, 4.3, SimConfig{1e-2, 1.0, 100, 1});
    CHECK_THROWS_AS(martingale_diagnostic(sol, tiny, cps), Error);
}

TEST_CASE("deviation suite holds at unit-test scale") {
    const Solution sol = worked_solution(4.6, 0.12, 0.5);
    const PathSet ps(kWorked, 4.6, SimConfig{2e-3, 6.0, 20000, 1212});
    for (int player : {1, 2}) {
        const auto devs = default_deviations(sol);
        const DiagnosticsReport rep = deviation_test(player, sol, ps, devs);
        CHECK(rep.deviations.size() == 14);
        CHECK(rep.pass);
    }
    // immediate stop below the touch point: worth g(x0) <= u1
    const Solution low = worked_solution(3.5, 0.12, 0.5);
    const PathSet lps(kWorked, 3.5, SimConfig{2e-3, 6.0, 12000, 77});
    const std::vector<DeviationSpec> devs{{DeviationSpec::Kind::immediate, 0.0}};
    const DiagnosticsReport rep = deviation_test(1, low, lps, devs);
    CHECK(rep.deviations[0].estimate == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.deviations[0].ok);
}

TEST_CASE("stride-coupled estimates move little when dt halves") {
    const Solution sol = worked_solution(4.6, 0.12, 0.5);
    const PathSet fine(kWorked, 4.6, SimConfig{2.5e-3, 6.0, 20000, 333});
    EstimateOptions coarse_opt;
    coarse_opt.stride = 2;
    const GameEstimates coarse = estimate_game(sol, fine, coarse_opt);
    const GameEstimates finer = estimate_game(sol, fine);
    CHECK(std::abs(coarse.j1_formula.mean - finer.j1_formula.mean) <=
          2.0 * coarse.j1_formula.std_error);
    CHECK(std::abs(coarse.j2_formula.mean - finer.j2_formula.mean) <=
          2.0 * coarse.j2_formula.std_error);
}
