#include "stopgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stopgame {

double EquilibriumValues::psi(double x) const { return std::pow(x, gamma_); }

double EquilibriumValues::c_direct(double p1) const {
    const double y = boundary_.inverse(p1, 1e-13 * std::max(1.0, boundary_.upper_bg()));
    return g2_(y) / psi(y);
}

double EquilibriumValues::cprime_direct(double p1) const {
    const double y = boundary_.inverse(p1, 1e-13 * std::max(1.0, boundary_.upper_bg()));
    const double dgpsi = std::pow(y, -gamma_) * (1.0 - gamma_ + gamma_ * g2_.strike / y);
    return dgpsi / boundary_.derivative(y);
}

void EquilibriumValues::build_coefficient_tables() {
    // Parametrize by the state: p_j = b(y_j) avoids one bisection per node.
    constexpr std::size_t n = 4096;
    const double lo = boundary_.touch_a() + 2e-6 * (boundary_.upper_bg() - boundary_.touch_a());
    const double hi = boundary_.upper_bg() * (1.0 - 1e-9);
    std::vector<double> ps, cs, cps, ys, ws;
    ps.reserve(n);
    cs.reserve(n);
    cps.reserve(n);
    ys.reserve(n);
    ws.reserve(n);
    const double t_lo = std::log(lo), t_hi = std::log(hi);
    double prev_p = 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y =
            std::exp(t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        const double p = boundary_(y);
        if (!(p > 0.0 && p < 1.0) || p >= prev_p) continue; // keep p strictly decreasing
        prev_p = p;
        ps.push_back(p);
        ys.push_back(y);
        cs.push_back(g2_(y) / psi(y));
        const double dgpsi = std::pow(y, -gamma_) * (1.0 - gamma_ + gamma_ * g2_.strike / y);
        const double cp = dgpsi / boundary_.derivative(y);
        cps.push_back(cp);
        const double den = vh2_(y) - g2_(y);
        ws.push_back(std::abs(den) < 1e-300 ? 0.0 : cp * psi(y) / den);
    }
    std::reverse(ps.begin(), ps.end());
    std::reverse(cs.begin(), cs.end());
    std::reverse(cps.begin(), cps.end());
    std::reverse(ys.begin(), ys.end());
    std::reverse(ws.begin(), ws.end());
    p_lo_ = ps.front();
    p_hi_ = ps.back();
    cprime_table_ = num::MonotoneCubic(ps, std::move(cps));
    y_table_ = num::MonotoneCubic(ps, std::move(ys));
    w_table_ = num::MonotoneCubic(ps, std::move(ws));
    c_table_ = num::MonotoneCubic(std::move(ps), std::move(cs));
}

double EquilibriumValues::coefficient_c(double p1) const {
    if (mode_ == BoundaryMode::martingale)
        throw Error(Errc::out_of_range, "coefficient_c: martingale regime has no c(p)");
    if (!(p1 > 0.0 && p1 < 1.0))
        throw Error(Errc::out_of_range, "coefficient_c: p1 must lie in (0,1)");
    if (p1 < p_lo_ || p1 > p_hi_) return c_direct(p1);
    return c_table_(p1);
}

double EquilibriumValues::u1(double x, double p1) const {
    if (mode_ != BoundaryMode::ode)
        return (1.0 - p1) * vg1_(x) + p1 * vh1_(x);
    if (p1 <= 0.0) return vg1_(x);
    const double bx = boundary_(x);
    if (p1 <= bx) return coefficient_c(p1) * psi(x);
    const double denom = std::max(1.0 - bx, 1e-300);
    return ((1.0 - p1) * g1_(x) + (p1 - bx) * vh1_(x)) / denom;
}

double EquilibriumValues::u2(double x, double p1) const {
    if (mode_ == BoundaryMode::martingale)
        return std::max((1.0 - p1) * vg2_(x) + p1 * vh2_(x), g2_(x));
    if (p1 <= 0.0) return vg2_(x);
    if (p1 <= boundary_(x)) return coefficient_c(p1) * psi(x);
    return g2_(x);
}

double EquilibriumValues::u2_continuation(double x, double p1) const {
    if (mode_ == BoundaryMode::martingale)
        return (1.0 - p1) * vg2_(x) + p1 * vh2_(x);
    return coefficient_c(p1) * psi(x);
}

double EquilibriumValues::du2_dp1(double x, double p1) const {
    if (mode_ == BoundaryMode::martingale) return vh2_(x) - vg2_(x);
    if (!(p1 > 0.0 && p1 < 1.0))
        throw Error(Errc::out_of_range, "du2_dp1: p1 must lie in (0,1)");
    const double cp = (p1 < p_lo_ || p1 > p_hi_) ? cprime_direct(p1) : cprime_table_(p1);
    return cp * psi(x);
}

double EquilibriumValues::boundary_state(double p1) const {
    if (mode_ == BoundaryMode::martingale || p1 < p_lo_ || p1 > p_hi_)
        return boundary_.inverse(p1, 1e-13 * std::max(1.0, boundary_.upper_bg()));
    return y_table_(p1);
}

double EquilibriumValues::w_coefficient(double p1) const {
    if (mode_ == BoundaryMode::martingale || p1 < p_lo_ || p1 > p_hi_) {
        const double y = boundary_state(p1);
        const double den = vh2_(y) - g2_(y);
        if (std::abs(den) < 1e-300) return 0.0;
        if (mode_ == BoundaryMode::martingale)
            return (vh2_(y) - vg2_(y)) / den;
        return cprime_direct(p1) * psi(y) / den;
    }
    return w_table_(p1);
}

EquilibriumValues values_martingale(const ValueFunction& vg, const ValueFunction& vh,
                                    const Payoff& g, const Boundary& b) {
    EquilibriumValues v;
    v.mode_ = BoundaryMode::martingale;
    v.boundary_ = b;
    v.vg1_ = v.vg2_ = vg;
    v.vh1_ = v.vh2_ = vh;
    v.g1_ = v.g2_ = g;
    v.gamma_ = vg.roots.gamma;
    return v;
}

EquilibriumValues values_ode(const Boundary& b, const Payoff& g, const Roots& roots,
                             const ValueFunction& vh, const ValueFunction& vg) {
    EquilibriumValues v;
    v.mode_ = BoundaryMode::ode;
    v.boundary_ = b;
    v.vg1_ = v.vg2_ = vg;
    v.vh1_ = v.vh2_ = vh;
    v.g1_ = v.g2_ = g;
    v.gamma_ = roots.gamma;
    v.build_coefficient_tables();
    return v;
}

EquilibriumValues values_asym(const Boundary& b, const Roots& roots,
                              const ValueFunction& vg1, const ValueFunction& vh1, const Payoff& g1,
                              const ValueFunction& vg2, const ValueFunction& vh2, const Payoff& g2) {
    EquilibriumValues v;
    v.mode_ = BoundaryMode::asym;
    v.boundary_ = b;
    v.vg1_ = vg1;
    v.vh1_ = vh1;
    v.vg2_ = vg2;
    v.vh2_ = vh2;
    v.g1_ = g1;
    v.g2_ = g2;
    v.gamma_ = roots.gamma;
    v.build_coefficient_tables();
    return v;
}

double Solution::m1_0() const {
    const double x0 = game.x0;
    const double p1 = game.player1.p;
    const double m0 = std::min(boundary()(x0), p1);
    const double gamma2_0 = (p1 - m0) / (p1 * (1.0 - m0));
    return (1.0 - p1 * gamma2_0) * values.u1(x0, m0) + p1 * gamma2_0 * values.vh1()(x0);
}

double Solution::m2_0() const { return values.u2(game.x0, game.player1.p); }

namespace {

bool same_payoff(const Payoff& a, const Payoff& b) {
    return a.kind == b.kind && (a.kind == PayoffKind::zero || a.strike == b.strike);
}

} // namespace

Solution solve(const GameSpec& game, BoundaryMode mode) {
    const double p1 = game.player1.p;
    const double p2 = game.player2.p;
    if (!(p1 <= p2))
        throw Error(Errc::bad_config, "solve: requires p1 <= p2 (player 1 is the late stopper)");

    const Roots roots = characteristic_roots(game.params);
    const ValueFunction vg1 = single_player_value(game.params, game.player1.g);
    const ValueFunction vh1 = single_player_value(game.params, game.player1.h);
    const ValueFunction vg2 = single_player_value(game.params, game.player2.g);
    const ValueFunction vh2 = single_player_value(game.params, game.player2.h);

    switch (mode) {
    case BoundaryMode::martingale: {
        if (!same_payoff(game.player1.g, game.player2.g) ||
            !same_payoff(game.player1.h, game.player2.h))
            throw Error(Errc::bad_config, "martingale regime: payoffs must be symmetric");
        Boundary b = martingale_boundary(vg1, vh1, game.player1.g);
        return Solution{game, roots, mode,
                        values_martingale(vg1, vh1, game.player1.g, b),
                        vg1.threshold, vg1.threshold};
    }
    case BoundaryMode::ode: {
        if (!same_payoff(game.player1.g, game.player2.g) ||
            !same_payoff(game.player1.h, game.player2.h))
            throw Error(Errc::bad_config, "ode regime: payoffs must be symmetric");
        if (game.player1.g.kind != PayoffKind::call)
            throw Error(Errc::bad_config, "ode regime: call stopping payoff required");
        Boundary b = ode_boundary(game.params, game.player1.g.strike, vh1);
        return Solution{game, roots, mode,
                        values_ode(b, game.player1.g, roots, vh1, vg1),
                        vg1.threshold, vg1.threshold};
    }
    case BoundaryMode::asym: {
        for (const PlayerSpec* pl : {&game.player1, &game.player2}) {
            if (pl->g.kind != PayoffKind::call || pl->h.kind != PayoffKind::call)
                throw Error(Errc::bad_config, "asym regime: call payoffs required for g and h");
            if (!(pl->g.strike < pl->h.strike))
                throw Error(Errc::bad_config, "asym regime: need K_i < L_i");
        }
        if (!(game.player2.g.strike <= game.player1.g.strike))
            throw Error(Errc::bad_config, "asym regime: need K_2 <= K_1");
        const double a2 =
            find_touch_point(game.player2.g, vh2, game.player2.g.strike, vg2.threshold);
        Boundary b = asym_boundary(vg1, vh1, game.player1.g, a2, vg2.threshold);
        return Solution{game, roots, mode,
                        values_asym(b, roots, vg1, vh1, game.player1.g, vg2, vh2, game.player2.g),
                        vg1.threshold, vg2.threshold};
    }
    }
    throw Error(Errc::bad_config, "solve: unknown regime");
}

} // namespace stopgame
