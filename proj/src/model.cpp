#include "stopgame/model.hpp"

#include <algorithm>
#include <cmath>

namespace stopgame {

ModelParams validate(double mu, double sigma, double r) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw Error(Errc::non_positive_sigma, "sigma must be positive");
    if (!std::isfinite(mu) || !std::isfinite(r))
        throw Error(Errc::bad_config, "non-finite model parameter");
    if (r < 0.0)
        throw Error(Errc::negative_rate, "discount rate must be nonnegative");
    if (r == 0.0)
        // The closed-form machinery needs gamma > 1, which degenerates at r = 0.
        throw Error(Errc::negative_rate, "discount rate must be positive for the closed-form solvers");
    if (!(mu < r))
        throw Error(Errc::drift_not_below_rate, "drift must be strictly below the discount rate");
    return ModelParams{mu, sigma, r};
}

double characteristic_residual(const ModelParams& p, double z) noexcept {
    return 0.5 * p.sigma * p.sigma * z * (z - 1.0) + p.mu * z - p.r;
}

Roots characteristic_roots(const ModelParams& p) {
    // (s2/2) z^2 + (mu - s2/2) z - r = 0
    const double a = 0.5 * p.sigma * p.sigma;
    const double b = p.mu - a;
    const double c = -p.r;
    const double disc = b * b - 4.0 * a * c; // > 0 since c/a < 0
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    double z1 = q / a;
    double z2 = c / q; // product of roots = c/a = -2r/sigma^2
    if (z1 < z2) std::swap(z1, z2);
    return Roots{z1, z2};
}

double Payoff::operator()(double x) const noexcept {
    switch (kind) {
    case PayoffKind::call: return std::max(x - strike, 0.0);
    case PayoffKind::put: return std::max(strike - x, 0.0);
    case PayoffKind::zero: return 0.0;
    }
    return 0.0;
}

double Payoff::slope(double x) const noexcept {
    switch (kind) {
    case PayoffKind::call: return x > strike ? 1.0 : 0.0;
    case PayoffKind::put: return x < strike ? -1.0 : 0.0;
    case PayoffKind::zero: return 0.0;
    }
    return 0.0;
}

Payoff call_payoff(double strike) {
    if (!(strike > 0.0))
        throw Error(Errc::bad_config, "call strike must be positive");
    return Payoff{PayoffKind::call, strike};
}

Payoff put_payoff(double strike) {
    if (!(strike > 0.0))
        throw Error(Errc::bad_config, "put strike must be positive");
    return Payoff{PayoffKind::put, strike};
}

Payoff zero_payoff() { return Payoff{PayoffKind::zero, 0.0}; }

namespace {

bool dominates(const Payoff& g, const Payoff& h) {
    if (h.kind == PayoffKind::zero) return true;
    if (g.kind == PayoffKind::zero) return false;
    if (g.kind == PayoffKind::call && h.kind == PayoffKind::call)
        return g.strike <= h.strike;
    if (g.kind == PayoffKind::put && h.kind == PayoffKind::put)
        return g.strike >= h.strike;
    // Mixed call/put: check on a grid around both strikes.
    const double hi = 2.0 * std::max(g.strike, h.strike);
    for (int i = 1; i <= 400; ++i) {
        const double x = hi * static_cast<double>(i) / 400.0;
        if (g(x) < h(x)) return false;
    }
    return true;
}

} // namespace

GameSpec make_game(const ModelParams& params, double x0,
                   const PlayerSpec& player1, const PlayerSpec& player2) {
    if (!(x0 > 0.0) || !std::isfinite(x0))
        throw Error(Errc::bad_config, "initial state must be positive");
    for (const PlayerSpec* pl : {&player1, &player2}) {
        if (!(pl->p > 0.0) || !(pl->p <= 1.0))
            throw Error(Errc::bad_config, "competition probability must lie in (0,1]");
        if (pl->g.kind == PayoffKind::zero)
            throw Error(Errc::bad_config, "stopping payoff must not be identically zero");
        if (!dominates(pl->g, pl->h))
            throw Error(Errc::bad_config, "stopping payoff must dominate consolation payoff");
    }
    if (!(std::min(player1.p, player2.p) < 1.0))
        throw Error(Errc::bad_config, "at least one competition probability must be below 1");
    return GameSpec{params, x0, player1, player2};
}

} // namespace stopgame
