#pragma once

#include "stopgame/boundary.hpp"

namespace stopgame {

/// Candidate equilibrium value functions u1(x, p1) and u2(x, p1) for the
/// three solved regimes. p2 never enters while p1 <= p2.
///
/// martingale / asym:  u1 = (1-p1) V^{g_1} + p1 V^{h_1}
/// ode:                u1 = V^g at p1 = 0, c(p1) psi(x) while p1 <= b(x) with
///                     c(p) = g(b^{-1}(p))/psi(b^{-1}(p)), and the convex
///                     mixture ((1-p1) g + (p1-b) V^h)/(1-b) above the boundary
/// u2 follows the per-regime displays, equal to g_2 above the boundary.
class EquilibriumValues {
public:
    BoundaryMode mode() const noexcept { return mode_; }
    const Boundary& boundary() const noexcept { return boundary_; }

    double u1(double x, double p1) const;
    double u2(double x, double p1) const;

    /// Continuation-branch u2 extended across the seam (the formula valid for
    /// 0 < p1 <= b(x), evaluated for any p1 in (0,1)).
    double u2_continuation(double x, double p1) const;
    /// Continuation-branch partial derivative of u2 in p1 (analytic; drives
    /// the asymmetric control ODE).
    double du2_dp1(double x, double p1) const;
    /// c(p1) = g_2(b^{-1}(p1)) / psi(b^{-1}(p1)) for the ode/asym regimes.
    double coefficient_c(double p1) const;

    /// Boundary point b^{-1}(p1) (table-backed for the ode/asym regimes).
    double boundary_state(double p1) const;
    /// W(p) = c'(p) psi(y) / (V^{h_2}(y) - g_2(y)) at y = b^{-1}(p): the
    /// state-dependent factor of the asymmetric control ODE, which reduces to
    /// dGamma^1 = W(Pi) (1 - p2 Gamma^1)/p2 * (-dPi) along points of increase.
    double w_coefficient(double p1) const;

    const ValueFunction& vg1() const noexcept { return vg1_; }
    const ValueFunction& vh1() const noexcept { return vh1_; }
    const ValueFunction& vg2() const noexcept { return vg2_; }
    const ValueFunction& vh2() const noexcept { return vh2_; }
    const Payoff& g1() const noexcept { return g1_; }
    const Payoff& g2() const noexcept { return g2_; }

private:
    friend EquilibriumValues values_martingale(const ValueFunction&, const ValueFunction&,
                                               const Payoff&, const Boundary&);
    friend EquilibriumValues values_ode(const Boundary&, const Payoff&, const Roots&,
                                        const ValueFunction&, const ValueFunction&);
    friend EquilibriumValues values_asym(const Boundary&, const Roots&,
                                         const ValueFunction&, const ValueFunction&, const Payoff&,
                                         const ValueFunction&, const ValueFunction&, const Payoff&);

    void build_coefficient_tables();
    double c_direct(double p1) const;
    double cprime_direct(double p1) const;
    double psi(double x) const;

    BoundaryMode mode_{BoundaryMode::martingale};
    Boundary boundary_;
    ValueFunction vg1_, vh1_, vg2_, vh2_;
    Payoff g1_, g2_;
    double gamma_{0.0};
    num::MonotoneCubic c_table_, cprime_table_, y_table_, w_table_;
    double p_lo_{0.0}, p_hi_{1.0};
};

EquilibriumValues values_martingale(const ValueFunction& vg, const ValueFunction& vh,
                                    const Payoff& g, const Boundary& b);
EquilibriumValues values_ode(const Boundary& b, const Payoff& g, const Roots& roots,
                             const ValueFunction& vh, const ValueFunction& vg);
EquilibriumValues values_asym(const Boundary& b, const Roots& roots,
                              const ValueFunction& vg1, const ValueFunction& vh1, const Payoff& g1,
                              const ValueFunction& vg2, const ValueFunction& vh2, const Payoff& g2);

/// Everything the simulator and CLI need for one game: the validated setup,
/// single-player values, the equilibrium boundary and value functions, and
/// the hitting levels defining tau_{g_1}, tau_{g_2}.
struct Solution {
    GameSpec game;
    Roots roots;
    BoundaryMode mode{BoundaryMode::martingale};
    EquilibriumValues values;
    double stop_level_1{0.0}; // b_{g_1}
    double stop_level_2{0.0}; // b_{g_2}

    const Boundary& boundary() const noexcept { return values.boundary(); }
    /// Equilibrium value of player 1, M^1_0. Equals u1(x0, p1) whenever
    /// p1 <= b(x0); otherwise Gamma^2 charges mass at t = 0.
    double m1_0() const;
    /// Equilibrium value of player 2, M^2_0 = u2(x0, p1).
    double m2_0() const;
};

/// Builds the equilibrium for the requested regime, enforcing the per-mode
/// preconditions (symmetry, inclusion, the asymmetric ordering, p1 <= p2).
Solution solve(const GameSpec& game, BoundaryMode mode);

} // namespace stopgame
