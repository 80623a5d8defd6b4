#pragma once

#include "stopgame/model.hpp"
#include "stopgame/numerics.hpp"
#include "stopgame/single.hpp"

namespace stopgame {

enum class BoundaryMode { martingale, ode, asym };

/// Equilibrium stopping boundary p = b(x), nonincreasing from 1 (at and below
/// the touch point a) to 0 (at and above the upper end b_g). The reflected
/// belief-state pair (Pi^1, X) lives underneath its graph.
///
/// martingale / asym modes evaluate the closed form
///     b = (V^g - g) / (V^g - V^h)
/// between a and b_g; ode mode evaluates a quadrature-backed table of
///     b(x) = 1 - exp(-I(x)),  I(x) = int_x^{b_g} (g/psi)' psi / (g - V^h) dy,
/// clamped to 1 on (0, a + delta].
class Boundary {
public:
    BoundaryMode mode() const noexcept { return mode_; }
    double touch_a() const noexcept { return a_; }
    double upper_bg() const noexcept { return bg_; }

    double operator()(double x) const;
    /// Unique x in (touch_a, upper_bg) with b(x) = p; bisection to xtol.
    double inverse(double p, double xtol = 1e-10) const;
    /// Table-backed inverse for per-step estimator use (~1e-8 accurate);
    /// clamps to [touch_a, upper_bg] outside (0,1).
    double state_at(double p) const;
    /// Analytic derivative on (touch_a, upper_bg): quotient rule for the
    /// closed-form modes, the boundary ODE identity for ode mode.
    double derivative(double x) const;

    /// ode mode: evaluate b by direct adaptive quadrature, bypassing the
    /// table. Used by diagnostics that must not inherit interpolation error.
    double quadrature_eval(double x, double tol = 1e-12) const;

private:
    friend Boundary martingale_boundary(const ValueFunction&, const ValueFunction&, const Payoff&);
    friend Boundary ode_boundary(const ModelParams&, double, const ValueFunction&);
    friend Boundary asym_boundary(const ValueFunction&, const ValueFunction&, const Payoff&,
                                  double, double);

    double closed_form(double x) const;
    double integrand(double y) const;
    void build_inverse_table();

    BoundaryMode mode_{BoundaryMode::martingale};
    double a_{0.0};
    double bg_{0.0};
    ValueFunction vg_, vh_;
    Payoff g_;
    // ode mode
    double gamma_{0.0};
    double strike_{0.0};
    double delta_{0.0};
    num::MonotoneCubic table_;   // b over ln x on [a + delta, b_g]
    num::MonotoneCubic inverse_; // x over p
};

/// Touch point a solving V^h(a) = g(a) on [lo, hi]; returns the g-strike when
/// h is identically zero. Residual |V^h(a) - g(a)| <= 1e-10 max(1, g(a)).
double find_touch_point(const Payoff& g, const ValueFunction& vh, double lo, double hi);

/// Symmetric boundary under martingale consolation. Requires the inclusion
/// condition, which for call/call holds when the g-threshold sits below the
/// h-threshold and trivially when h == 0.
Boundary martingale_boundary(const ValueFunction& vg, const ValueFunction& vh, const Payoff& g);

/// Symmetric boundary from the indifference ODE, for g = (x-K)^+ and h <= g.
Boundary ode_boundary(const ModelParams& params, double strike, const ValueFunction& vh);

/// Example boundary for the asymmetric call/call game, built on player-1 data;
/// a2 and bg2 are player 2's touch point and threshold for the ordering check
/// a2 <= a1 < bg2.
Boundary asym_boundary(const ValueFunction& vg1, const ValueFunction& vh1, const Payoff& g1,
                       double a2, double bg2);

/// Absolute residual of the boundary ODE
///     (1-b)(g/psi)' psi + (g - V^h) b' = 0
/// at x, with analytic (g/psi)' psi and a 5-point finite-difference b' taken
/// on direct quadrature evaluations (one-sided near the ends).
double ode_residual(const Boundary& b, const Payoff& g, const Roots& roots,
                    const ValueFunction& vh, double x);

} // namespace stopgame
