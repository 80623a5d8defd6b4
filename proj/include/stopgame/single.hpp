#pragma once

#include "stopgame/model.hpp"

#include <limits>

namespace stopgame {

/// Closed-form single-player optimal stopping value under GBM.
///
/// Call with strike K:  V(x) = (b-K)(x/b)^gamma below the threshold
/// b = gamma K/(gamma-1), and x-K at or above it.
/// Put with strike K:   V(x) = (K-b)(x/b)^eta above b = eta K/(eta-1),
/// and K-x at or below it.
/// Zero payoff:         V == 0.
struct ValueFunction {
    Payoff payoff;
    ModelParams params;
    Roots roots;
    double threshold{std::numeric_limits<double>::infinity()};
    double coefficient{0.0}; // C in V = C x^exponent on the continuation side
    double exponent{0.0};

    double operator()(double x) const;
    /// Analytic derivative; at the threshold, the continuation-side limit.
    double derivative(double x) const;
    bool is_zero() const noexcept { return payoff.kind == PayoffKind::zero; }
};

ValueFunction call_value(const ModelParams& params, double strike);
ValueFunction put_value(const ModelParams& params, double strike);
ValueFunction zero_value(const ModelParams& params);
ValueFunction single_player_value(const ModelParams& params, const Payoff& payoff);

/// Drift-matched binomial lattice approximation of the perpetual stopping
/// value, truncated at `horizon`. Independent of the closed forms above; used
/// to cross-validate them. Throws Errc::insufficient_horizon when the
/// discounted-tail bound (x e^{(mu-r)T} for calls, K e^{-rT} for puts)
/// exceeds tail_tol.
double lattice_oracle(const Payoff& payoff, const ModelParams& params, double x,
                      int steps, double horizon, double tail_tol = 1e-6);

} // namespace stopgame
