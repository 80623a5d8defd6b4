#include "stopgame/sim.hpp"

#include "stopgame/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace stopgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Contiguous chunks; callers write per-path slots, so results do not depend
// on the worker count.
template <typename Fn>
void parallel_for_paths(std::size_t n, int threads, Fn&& fn) {
    const int t = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(resolve_threads(threads)), std::max<std::size_t>(n, 1)));
    if (t <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    const std::size_t chunk = (n + static_cast<std::size_t>(t) - 1) / static_cast<std::size_t>(t);
    for (int w = 0; w < t; ++w) {
        const std::size_t lo = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

double belief_of(double p, double gamma) { return p * (1.0 - gamma) / (1.0 - p * gamma); }

} // namespace

PathSet::PathSet(const ModelParams& params, double x0, const SimConfig& cfg)
    : params_(params), x0_(x0), cfg_(cfg) {
    if (!(x0 > 0.0))
        throw Error(Errc::bad_config, "PathSet: initial state must be positive");
    if (!(cfg.dt > 0.0))
        throw Error(Errc::bad_config, "PathSet: dt must be positive");
    if (cfg.n_paths < 1)
        throw Error(Errc::bad_config, "PathSet: need at least one path");
    const double steps = cfg.horizon / cfg.dt;
    const auto rounded = static_cast<std::size_t>(std::llround(steps));
    if (rounded < 1 || std::abs(static_cast<double>(rounded) * cfg.dt - cfg.horizon) >
                           1e-9 * std::max(1.0, cfg.horizon))
        throw Error(Errc::bad_config, "PathSet: horizon must be a positive multiple of dt");
    if (rounded > 1000000)
        throw Error(Errc::bad_config, "PathSet: step count exceeds the 1e6 cap");
    n_steps_ = rounded;
    log_drift_ = (params.mu - 0.5 * params.sigma * params.sigma) * cfg.dt;
    log_vol_ = params.sigma * std::sqrt(cfg.dt);
}

PathSet simulate_paths(const ModelParams& params, double x0, double dt, double horizon,
                       std::size_t n, std::uint64_t seed) {
    return PathSet(params, x0, SimConfig{dt, horizon, n, seed});
}

PathSet::Slice PathSet::states_strided(std::size_t i, std::span<double> out, int stride,
                                       double level1, double level2,
                                       std::span<const double> floor_states) const {
    if (stride < 1 || n_steps_ % static_cast<std::size_t>(stride) != 0)
        throw Error(Errc::bad_config, "PathSet: stride must divide the step count");
    const std::size_t ns = n_steps_ / static_cast<std::size_t>(stride);
    if (out.size() < ns + 1)
        throw Error(Errc::grid_mismatch, "PathSet: output buffer too small");

    rng::NormalSampler z(cfg_.seed, rng::path_stream(i));
    Slice s;
    out[0] = x0_;
    const auto arrived = [&](std::size_t idx, double xv) {
        if (s.hit2 == kNever && xv >= level2) s.hit2 = idx;
        if (s.hit1 == kNever && xv >= level1) {
            s.hit1 = idx;
            return true;
        }
        return !floor_states.empty() && xv <= floor_states[idx];
    };
    if (arrived(0, x0_)) {
        s.len = 1;
        return s;
    }
    double lx = std::log(x0_);
    for (std::size_t j = 1; j <= ns; ++j) {
        for (int u = 0; u < stride; ++u) lx += log_drift_ + log_vol_ * z();
        const double x = std::exp(lx);
        out[j] = x;
        if (arrived(j, x)) {
            s.len = j + 1;
            return s;
        }
    }
    s.len = ns + 1;
    return s;
}

void PathSet::states(std::size_t i, std::span<double> out) const {
    states_strided(i, out, 1, kInf, kInf, {});
}

std::size_t PathSet::first_hit(std::size_t i, double level) const {
    std::vector<double> xs(n_steps_ + 1);
    const Slice s = states_strided(i, xs, 1, level, kInf, {});
    return s.hit1;
}

double PathSet::tail_bound() const noexcept {
    return x0_ * std::exp((params_.mu - params_.r) * cfg_.horizon);
}

void PathSet::verify_horizon(double level, double tol) const {
    std::size_t hits = 0;
    std::vector<double> xs(n_steps_ + 1);
    for (std::size_t i = 0; i < cfg_.n_paths; ++i) {
        if (states_strided(i, xs, 1, level, kInf, {}).hit1 != kNever) ++hits;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(cfg_.n_paths);
    if (frac < 0.99 && tail_bound() > tol)
        throw Error(Errc::horizon_too_short,
                    "PathSet: threshold missed on >1% of paths and tail bound above tolerance");
}

McEstimate reduce_samples(std::span<const double> samples, Estimator mode) {
    McEstimate e;
    e.mode = mode;
    e.n = samples.size();
    if (e.n == 0) return e;
    double s = 0.0;
    for (double v : samples) s += v;
    e.mean = s / static_cast<double>(e.n);
    if (e.n >= 2) {
        double q = 0.0;
        for (double v : samples) q += (v - e.mean) * (v - e.mean);
        e.std_error = std::sqrt(q / static_cast<double>(e.n - 1)) /
                      std::sqrt(static_cast<double>(e.n));
    }
    return e;
}

IndicatorOutcome indicator_payoffs(const Solution& sol, std::span<const double> path, double dt,
                                   std::size_t gamma1, std::size_t gamma2, bool theta1,
                                   bool theta2) {
    const double r = sol.game.params.r;
    const auto disc_at = [&](std::size_t k) { return std::exp(-r * static_cast<double>(k) * dt); };
    const std::size_t ghat2 = theta1 ? gamma2 : kNever;
    const std::size_t ghat1 = theta2 ? gamma1 : kNever;
    IndicatorOutcome out;
    // Player 1 collects g1 on {gamma1 < ghat2}, the consolation on
    // {gamma1 >= ghat2}; payoffs at a never-realized time are zero.
    if (gamma1 != kNever && (ghat2 == kNever || gamma1 < ghat2))
        out.j1 = disc_at(gamma1) * sol.values.g1()(path[gamma1]);
    else if (ghat2 != kNever)
        out.j1 = disc_at(ghat2) * sol.values.vh1()(path[ghat2]);
    // Player 2 collects g2 on {gamma2 <= ghat1} (priority at ties).
    if (gamma2 != kNever && (ghat1 == kNever || gamma2 <= ghat1))
        out.j2 = disc_at(gamma2) * sol.values.g2()(path[gamma2]);
    else if (ghat1 != kNever)
        out.j2 = disc_at(ghat1) * sol.values.vh2()(path[ghat1]);
    return out;
}

namespace {

struct PathWork {
    std::vector<double> xs;
    ControlPath g1, g2;
    // closed prefix sums of e^{-rt} V^{h_i} dGamma^{3-i}
    std::vector<double> cons1, cons2;
    PathSet::Slice slice;
    double support{0.0};
    std::size_t skips{0};

    std::size_t last() const { return slice.len - 1; }
    // Gamma^1 with its terminal jump removed: the continuous-time control is
    // continuous off the recorded jump, so this is the left limit at k.
    double g1_left(std::size_t k) const {
        return k == g1.jump_index ? g1.pre_jump : g1.values[k];
    }
    // [0, t)-consolation for player 2: the closed sum minus the atom at t.
    double cons2_strict(std::size_t k, double disc_k, double vh2_k) const {
        if (k != g1.jump_index) return cons2[k];
        return cons2[k] - disc_k * vh2_k * (g1.values[k] - g1.pre_jump);
    }
};

// Per-run shared state and the per-stop payoff functionals. Everything is
// evaluated at grid states; the discounted single-player value processes are
// exact martingales under the lognormal stepping, which makes the current-
// value / jump-aware-left-limit conventions below telescope exactly against
// the equilibrium identities.
struct RunContext {
    const Solution* sol{nullptr};
    const PathSet* ps{nullptr};
    int stride{1};
    std::size_t ns{0};
    double dte{0.0};
    std::vector<double> disc;
    std::vector<double> floor_states;
    double p1{0.0}, p2{0.0};
    bool asym{false};
    bool truncate_at_hit{true};

    void init(const Solution& s, const PathSet& p, int stride_, double value_floor,
              bool truncate) {
        sol = &s;
        ps = &p;
        stride = stride_;
        if (stride < 1 || p.n_steps() % static_cast<std::size_t>(stride) != 0)
            throw Error(Errc::bad_config, "estimate: stride must divide the step count");
        ns = p.n_steps() / static_cast<std::size_t>(stride);
        dte = p.dt() * stride;
        p1 = s.game.player1.p;
        p2 = s.game.player2.p;
        asym = s.mode == BoundaryMode::asym;
        truncate_at_hit = truncate;
        disc.resize(ns + 1);
        const double r = s.game.params.r;
        for (std::size_t k = 0; k <= ns; ++k)
            disc[k] = std::exp(-r * static_cast<double>(k) * dte);
        if (value_floor > 0.0) {
            // e^{-rt} V^{g_1}(x) <= floor  <=>  x <= (floor / (disc C))^(1/gamma)
            const double c = s.values.vg1().coefficient;
            const double g = s.values.vg1().exponent;
            floor_states.resize(ns + 1);
            for (std::size_t k = 0; k <= ns; ++k)
                floor_states[k] = std::pow(value_floor / (disc[k] * c), 1.0 / g);
        }
    }

    void run_path(std::size_t i, PathWork& w, bool want_support) const {
        const double level1 = truncate_at_hit ? sol->stop_level_1 : kInf;
        w.xs.resize(ns + 1);
        w.slice = ps->states_strided(i, w.xs, stride, level1, sol->stop_level_2, floor_states);
        if (!truncate_at_hit) {
            w.slice.hit1 = kNever;
            w.slice.hit2 = kNever;
            for (std::size_t k = 0; k < w.slice.len; ++k) {
                if (w.slice.hit2 == kNever && w.xs[k] >= sol->stop_level_2) w.slice.hit2 = k;
                if (w.xs[k] >= sol->stop_level_1) {
                    w.slice.hit1 = k;
                    break;
                }
            }
        }
        const std::span<const double> x(w.xs.data(), w.slice.len);
        const HoldRule hold{w.slice.hit2, w.slice.hit1, sol->stop_level_2};
        w.g2 = gamma2_from_boundary(x, sol->boundary(), p1, asym ? &hold : nullptr);
        w.skips = 0;
        if (asym) {
            AsymIntegration st;
            w.g1 = gamma1_asym(x, w.g2, sol->values, p1, p2, w.slice.hit2, &st);
            w.skips = st.denominator_skips;
        } else {
            w.g1 = gamma1_sym(w.g2, ps->x0(), sol->boundary(), p1, p2, w.slice.hit1, sol->mode);
        }

        const auto& vh1 = sol->values.vh1();
        const auto& vh2 = sol->values.vh2();
        const auto& g2p = sol->values.g2();
        w.cons1.assign(w.slice.len, 0.0);
        w.cons2.assign(w.slice.len, 0.0);
        w.support = 0.0;
        double a1 = 0.0, a2 = 0.0;
        for (std::size_t k = 0; k < w.slice.len; ++k) {
            const double dg2 = w.g2.increment(k);
            const double dg1 = w.g1.increment(k);
            if (dg2 > 0.0) {
                a1 += disc[k] * vh1(w.xs[k]) * dg2;
                if (want_support) {
                    const double pi_prev = belief_of(p1, w.g2.left_limit(k));
                    w.support = std::max(
                        w.support, std::abs(sol->values.u2(w.xs[k], pi_prev) - g2p(w.xs[k])));
                }
            }
            if (dg1 > 0.0) a2 += disc[k] * vh2(w.xs[k]) * dg1;
            w.cons1[k] = a1;
            w.cons2[k] = a2;
        }
    }

    // Player 1's payoff functional at the stopping index tau (kNever =
    // never stop): closed consolation range, current opponent control.
    double j1_at(const PathWork& w, std::size_t tau) const {
        if (tau == kNever) return p1 * w.cons1[w.last()];
        return disc[tau] * (1.0 - p1 * w.g2.values[tau]) * sol->values.g1()(w.xs[tau]) +
               p1 * w.cons1[tau];
    }

    // Player 2's payoff functional at tau: the left limit of Gamma^1 and the
    // strict [0, tau) range differ from current values only across the jump.
    double j2_at(const PathWork& w, std::size_t tau) const {
        if (tau == kNever) return p2 * w.cons2[w.last()];
        const double vh2_k = sol->values.vh2()(w.xs[tau]);
        return disc[tau] * (1.0 - p2 * w.g1_left(tau)) * sol->values.g2()(w.xs[tau]) +
               p2 * w.cons2_strict(tau, disc[tau], vh2_k);
    }

    // Randomization integrated out exactly over the control's increments.
    double j1_formula(const PathWork& w) const {
        double v = 0.0;
        for (std::size_t k = 0; k < w.slice.len; ++k) {
            const double dg = w.g1.increment(k);
            if (dg > 0.0) v += dg * j1_at(w, k);
        }
        const double rest = 1.0 - w.g1.values[w.last()];
        if (rest > 0.0) v += rest * j1_at(w, kNever);
        return v;
    }

    double j2_formula(const PathWork& w) const {
        double v = 0.0;
        for (std::size_t k = 0; k < w.slice.len; ++k) {
            const double dg = w.g2.increment(k);
            if (dg > 0.0) v += dg * j2_at(w, k);
        }
        const double rest = 1.0 - w.g2.values[w.last()];
        if (rest > 0.0) v += rest * j2_at(w, kNever);
        return v;
    }
};

} // namespace

GameEstimates estimate_game(const Solution& sol, const PathSet& ps, const EstimateOptions& opt) {
    RunContext ctx;
    ctx.init(sol, ps, opt.stride, opt.value_floor, /*truncate=*/true);
    const std::size_t n = ps.n_paths();
    std::vector<double> j1f(n), j2f(n), j1i(n), j2i(n), support(n);
    std::vector<std::uint8_t> h1(n), h2(n);
    std::vector<std::size_t> skips(n);

    parallel_for_paths(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
        PathWork w;
        for (std::size_t i = lo; i < hi; ++i) {
            ctx.run_path(i, w, /*want_support=*/true);
            j1f[i] = ctx.j1_formula(w);
            j2f[i] = ctx.j2_formula(w);

            rng::Xoshiro256 gs(ps.seed() ^ (opt.game_seed * 0x9e3779b97f4a7c15ULL),
                               rng::game_stream(i));
            const bool th1 = gs.uniform() < ctx.p1;
            const bool th2 = gs.uniform() < ctx.p2;
            const double u1 = gs.uniform();
            const double u2 = gs.uniform();
            const std::size_t gam1 = randomized_stop(w.g1, u1);
            const std::size_t gam2 = randomized_stop(w.g2, u2);

            // Player 1 collects g1 when the (realized) opponent has not fired
            // by the end of gamma1's step: {U2 >= Gamma^2_{gamma1}}.
            if (gam1 != kNever && (!th1 || u2 >= w.g2.values[gam1]))
                j1i[i] = ctx.disc[gam1] * sol.values.g1()(w.xs[gam1]);
            else if (th1 && gam2 != kNever)
                j1i[i] = ctx.disc[gam2] * sol.values.vh1()(w.xs[gam2]);
            else
                j1i[i] = 0.0;

            // Player 2 collects g2 when player 1's continuous part has not
            // fired by gamma2's step and the terminal atom (if it sits in the
            // same step) has not fired strictly earlier: {U1 >= G1_left}.
            if (gam2 != kNever && (!th2 || u1 >= w.g1_left(gam2)))
                j2i[i] = ctx.disc[gam2] * sol.values.g2()(w.xs[gam2]);
            else if (th2 && gam1 != kNever)
                j2i[i] = ctx.disc[gam1] * sol.values.vh2()(w.xs[gam1]);
            else
                j2i[i] = 0.0;

            support[i] = w.support;
            skips[i] = w.skips;
            h1[i] = w.slice.hit1 != kNever;
            h2[i] = w.slice.hit2 != kNever;
        }
    });

    GameEstimates out;
    out.j1_formula = reduce_samples(j1f, Estimator::formula);
    out.j2_formula = reduce_samples(j2f, Estimator::formula);
    out.j1_indicator = reduce_samples(j1i, Estimator::indicator);
    out.j2_indicator = reduce_samples(j2i, Estimator::indicator);
    for (std::size_t i = 0; i < n; ++i) {
        out.support_violation_max = std::max(out.support_violation_max, support[i]);
        out.denominator_skips += skips[i];
        out.hit_fraction_1 += h1[i] ? 1.0 : 0.0;
        out.hit_fraction_2 += h2[i] ? 1.0 : 0.0;
    }
    out.hit_fraction_1 /= static_cast<double>(n);
    out.hit_fraction_2 /= static_cast<double>(n);
    out.tail_bound = ps.tail_bound();
    return out;
}

McEstimate estimate_J(int player, Estimator mode, const Solution& sol, const PathSet& ps,
                      const EstimateOptions& opt) {
    if (player != 1 && player != 2)
        throw Error(Errc::bad_config, "estimate_J: player must be 1 or 2");
    const GameEstimates g = estimate_game(sol, ps, opt);
    if (player == 1) return mode == Estimator::formula ? g.j1_formula : g.j1_indicator;
    return mode == Estimator::formula ? g.j2_formula : g.j2_indicator;
}

MPath build_M_path(const Solution& sol, std::span<const double> path,
                   const ControlPath& gamma1, const ControlPath& gamma2, double dt,
                   double u1_scale, double u2_scale) {
    if (path.size() != gamma1.size() || path.size() != gamma2.size())
        throw Error(Errc::grid_mismatch, "build_M_path: grids differ");
    const double p1 = sol.game.player1.p;
    const double p2 = sol.game.player2.p;
    const double r = sol.game.params.r;
    MPath mp;
    mp.m1.resize(path.size());
    mp.m2.resize(path.size());
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double d = std::exp(-r * static_cast<double>(k) * dt);
        const double vh2_k = sol.values.vh2()(path[k]);
        s1 += d * sol.values.vh1()(path[k]) * gamma2.increment(k);
        s2 += d * vh2_k * gamma1.increment(k);
        // The continuous-time controls and beliefs are continuous off the
        // recorded terminal jump, so left limits evaluate at current values;
        // the jump itself uses its pre-jump value and stays outside the
        // strict [0, t) consolation range.
        const double g1_left = k == gamma1.jump_index ? gamma1.pre_jump : gamma1.values[k];
        const double s2_strict =
            k == gamma1.jump_index
                ? s2 - d * vh2_k * (gamma1.values[k] - gamma1.pre_jump)
                : s2;
        const double pi_now = belief_of(p1, gamma2.values[k]);
        mp.m1[k] = d * (1.0 - p1 * gamma2.values[k]) * u1_scale * sol.values.u1(path[k], pi_now) +
                   p1 * s1;
        mp.m2[k] = d * (1.0 - p2 * g1_left) * u2_scale * sol.values.u2(path[k], pi_now) +
                   p2 * s2_strict;
    }
    return mp;
}

DiagnosticsReport martingale_diagnostic(const Solution& sol, const PathSet& ps,
                                        std::span<const double> checkpoint_times,
                                        const DiagOptions& opt) {
    if (ps.n_paths() < 10000)
        throw Error(Errc::bad_config, "martingale_diagnostic: need at least 1e4 paths");
    if (checkpoint_times.empty())
        throw Error(Errc::bad_config, "martingale_diagnostic: need at least one checkpoint");

    RunContext ctx;
    ctx.init(sol, ps, 1, 0.0, /*truncate=*/false);
    const std::size_t ncp = checkpoint_times.size();
    std::vector<std::size_t> idx(ncp);
    for (std::size_t j = 0; j < ncp; ++j) {
        const auto k = static_cast<std::size_t>(std::llround(checkpoint_times[j] / ctx.dte));
        idx[j] = std::min(k, ctx.ns);
    }

    // M_0 is deterministic given x0.
    const double p1 = ctx.p1;
    const double m0 = std::min(sol.boundary()(ps.x0()), p1);
    const double g20 = (p1 - m0) / (p1 * (1.0 - m0));
    const double m1_0 = (1.0 - p1 * g20) * opt.u1_scale * sol.values.u1(ps.x0(), m0) +
                        p1 * g20 * sol.values.vh1()(ps.x0());
    const double m2_0 = opt.u2_scale * sol.values.u2(ps.x0(), p1);

    const std::size_t n = ps.n_paths();
    std::vector<double> st1(n * ncp), un1(n * ncp), st2(n * ncp), un2(n * ncp);

    parallel_for_paths(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
        PathWork w;
        for (std::size_t i = lo; i < hi; ++i) {
            ctx.run_path(i, w, /*want_support=*/false);
            const auto m_at = [&](std::size_t k, bool first) {
                const double d = ctx.disc[k];
                const double pi_now = belief_of(p1, w.g2.values[k]);
                if (first)
                    return d * (1.0 - p1 * w.g2.values[k]) * opt.u1_scale *
                               sol.values.u1(w.xs[k], pi_now) +
                           p1 * w.cons1[k];
                const double vh2_k = sol.values.vh2()(w.xs[k]);
                return d * (1.0 - ctx.p2 * w.g1_left(k)) * opt.u2_scale *
                           sol.values.u2(w.xs[k], pi_now) +
                       ctx.p2 * w.cons2_strict(k, d, vh2_k);
            };
            const std::size_t tau1 = std::min(w.slice.hit1, w.last());
            const std::size_t tau2 = std::min(w.slice.hit2, w.last());
            for (std::size_t j = 0; j < ncp; ++j) {
                const std::size_t k = std::min(idx[j], w.last());
                st1[i * ncp + j] = m_at(std::min(k, tau1), true);
                un1[i * ncp + j] = m_at(k, true);
                st2[i * ncp + j] = m_at(std::min(k, tau2), false);
                un2[i * ncp + j] = m_at(k, false);
            }
        }
    });

    DiagnosticsReport rep;
    std::vector<double> col(n), prev_un(n);
    for (int which = 1; which <= 2; ++which) {
        const auto& st = which == 1 ? st1 : st2;
        const auto& un = which == 1 ? un1 : un2;
        const double m0v = which == 1 ? m1_0 : m2_0;
        for (std::size_t j = 0; j < ncp; ++j) {
            CheckpointRow row;
            row.which = which;
            row.t = checkpoint_times[j];
            row.m0 = m0v;
            for (std::size_t i = 0; i < n; ++i) col[i] = st[i * ncp + j];
            const auto sm = reduce_samples(col, Estimator::formula);
            row.stopped_mean = sm.mean;
            row.stopped_se = sm.std_error;
            for (std::size_t i = 0; i < n; ++i) col[i] = un[i * ncp + j];
            const auto um = reduce_samples(col, Estimator::formula);
            row.unstopped_mean = um.mean;
            row.unstopped_se = um.std_error;
            row.martingale_ok = std::abs(sm.mean - m0v) <= 3.0 * sm.std_error;
            row.supermartingale_ok = um.mean <= m0v + 3.0 * um.std_error;
            if (j > 0) {
                std::vector<double> diff(n);
                for (std::size_t i = 0; i < n; ++i) diff[i] = col[i] - prev_un[i];
                const auto dm = reduce_samples(diff, Estimator::formula);
                row.monotone_ok = dm.mean <= 3.0 * dm.std_error;
            }
            prev_un = col;
            rep.pass = rep.pass && row.martingale_ok && row.supermartingale_ok && row.monotone_ok;
            rep.checkpoints.push_back(std::move(row));
        }
    }
    return rep;
}

std::string DeviationSpec::label() const {
    switch (kind) {
    case Kind::threshold: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "threshold_%.6g", value);
        return buf;
    }
    case Kind::immediate: return "immediate";
    case Kind::never: return "never";
    case Kind::randomized_u: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "gamma_u_%.3g", value);
        return buf;
    }
    }
    return "?";
}

std::vector<DeviationSpec> default_deviations(const Solution& sol) {
    std::vector<DeviationSpec> devs;
    const double a = sol.boundary().touch_a();
    const double top = 1.2 * sol.boundary().upper_bg();
    for (int j = 1; j <= 12; ++j)
        devs.push_back({DeviationSpec::Kind::threshold,
                        a + (top - a) * static_cast<double>(j) / 13.0});
    devs.push_back({DeviationSpec::Kind::immediate, 0.0});
    devs.push_back({DeviationSpec::Kind::never, 0.0});
    return devs;
}

DiagnosticsReport deviation_test(int player, const Solution& sol, const PathSet& ps,
                                 std::span<const DeviationSpec> deviations,
                                 const EstimateOptions& opt) {
    if (player != 1 && player != 2)
        throw Error(Errc::bad_config, "deviation_test: player must be 1 or 2");
    if (deviations.empty())
        throw Error(Errc::bad_config, "deviation_test: need at least one deviation");

    RunContext ctx;
    // Threshold deviations may stop above b_g, so paths run to the horizon.
    ctx.init(sol, ps, opt.stride, opt.value_floor, /*truncate=*/false);

    // Sorted thresholds allow one first-passage sweep per path.
    std::vector<std::pair<double, std::size_t>> thresholds;
    for (std::size_t d = 0; d < deviations.size(); ++d)
        if (deviations[d].kind == DeviationSpec::Kind::threshold)
            thresholds.emplace_back(deviations[d].value, d);
    std::sort(thresholds.begin(), thresholds.end());

    const std::size_t n = ps.n_paths();
    const std::size_t nd = deviations.size();
    std::vector<double> diffs(n * nd); // deviation minus equilibrium, per path
    std::vector<double> vals(n * nd);
    std::vector<double> eq_samples(n);

    parallel_for_paths(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
        PathWork w;
        std::vector<std::size_t> tau(nd);
        for (std::size_t i = lo; i < hi; ++i) {
            ctx.run_path(i, w, /*want_support=*/false);
            const double eq = player == 1 ? ctx.j1_formula(w) : ctx.j2_formula(w);
            eq_samples[i] = eq;
            std::fill(tau.begin(), tau.end(), kNever);
            std::size_t next = 0;
            for (std::size_t k = 0; k < w.slice.len && next < thresholds.size(); ++k) {
                while (next < thresholds.size() && w.xs[k] >= thresholds[next].first) {
                    tau[thresholds[next].second] = k;
                    ++next;
                }
            }
            for (std::size_t d = 0; d < nd; ++d) {
                const auto& dev = deviations[d];
                std::size_t t = kNever;
                switch (dev.kind) {
                case DeviationSpec::Kind::threshold: t = tau[d]; break;
                case DeviationSpec::Kind::immediate: t = 0; break;
                case DeviationSpec::Kind::never: t = kNever; break;
                case DeviationSpec::Kind::randomized_u:
                    t = randomized_stop(player == 1 ? w.g1 : w.g2, dev.value);
                    break;
                }
                const double value = player == 1 ? ctx.j1_at(w, t) : ctx.j2_at(w, t);
                vals[i * nd + d] = value;
                diffs[i * nd + d] = value - eq;
            }
        }
    });

    DiagnosticsReport rep;
    const auto eq_est = reduce_samples(eq_samples, Estimator::formula);
    std::vector<double> col(n);
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t i = 0; i < n; ++i) col[i] = diffs[i * nd + d];
        const auto diff = reduce_samples(col, Estimator::formula);
        for (std::size_t i = 0; i < n; ++i) col[i] = vals[i * nd + d];
        const auto est = reduce_samples(col, Estimator::formula);
        DeviationRow row;
        row.id = deviations[d].label();
        row.player = player;
        row.estimate = est.mean;
        row.estimate_se = est.std_error;
        row.std_error = diff.std_error;
        row.equilibrium = eq_est.mean;
        row.margin = diff.mean;
        row.ok = row.margin <= 3.0 * diff.std_error;
        rep.pass = rep.pass && row.ok;
        rep.deviations.push_back(std::move(row));
    }
    return rep;
}

} // namespace stopgame
