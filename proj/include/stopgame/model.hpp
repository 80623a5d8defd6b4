#pragma once

#include "stopgame/errors.hpp"

namespace stopgame {

/// Geometric Brownian motion dX = mu X dt + sigma X dW on (0, inf),
/// discounted at rate r. Obtain instances through validate().
struct ModelParams {
    double mu{0.0};
    double sigma{0.0};
    double r{0.0};
};

/// Checks sigma > 0, r > 0 and mu < r (call values would be infinite
/// otherwise), returning the validated parameter set.
ModelParams validate(double mu, double sigma, double r);

/// Exponents gamma > 1 and eta < 0 of the power solutions x^z of the
/// generator equation (sigma^2/2) x^2 f'' + mu x f' - r f = 0.
struct Roots {
    double gamma{0.0};
    double eta{0.0};
};

/// Residual of (sigma^2/2) z(z-1) + mu z - r at z.
double characteristic_residual(const ModelParams& p, double z) noexcept;

/// Both roots of the characteristic quadratic, via the cancellation-safe
/// formula (larger-magnitude root first, the other from the Vieta product
/// -2r/sigma^2). With mu < r and r > 0, gamma > 1 and eta < 0.
Roots characteristic_roots(const ModelParams& p);

enum class PayoffKind { call, put, zero };

struct Payoff {
    PayoffKind kind{PayoffKind::zero};
    double strike{0.0};

    double operator()(double x) const noexcept;
    /// a.e. derivative in x (+1 / -1 in the money, 0 otherwise).
    double slope(double x) const noexcept;
};

Payoff call_payoff(double strike);
Payoff put_payoff(double strike);
Payoff zero_payoff();

/// One player's data: stopping payoff g, consolation payoff h (paid as the
/// single-player value V^h when forestalled) and competition probability p.
struct PlayerSpec {
    Payoff g;
    Payoff h;
    double p{0.0};
};

struct GameSpec {
    ModelParams params;
    double x0{0.0};
    PlayerSpec player1;
    PlayerSpec player2;
};

/// Validates x0 > 0, p_i in (0,1] with p1 ^ p2 < 1, sup g_i > 0 and
/// g_i >= h_i pointwise (exact for the call/call and h = zero cases,
/// grid-checked otherwise).
GameSpec make_game(const ModelParams& params, double x0,
                   const PlayerSpec& player1, const PlayerSpec& player2);

} // namespace stopgame
