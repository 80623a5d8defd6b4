#include "stopgame/single.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stopgame {

double ValueFunction::operator()(double x) const {
    switch (payoff.kind) {
    case PayoffKind::zero:
        return 0.0;
    case PayoffKind::call:
        return x < threshold ? coefficient * std::pow(x, exponent) : x - payoff.strike;
    case PayoffKind::put:
        return x > threshold ? coefficient * std::pow(x, exponent) : payoff.strike - x;
    }
    return 0.0;
}

double ValueFunction::derivative(double x) const {
    switch (payoff.kind) {
    case PayoffKind::zero:
        return 0.0;
    case PayoffKind::call:
        return x <= threshold ? coefficient * exponent * std::pow(x, exponent - 1.0) : 1.0;
    case PayoffKind::put:
        return x >= threshold ? coefficient * exponent * std::pow(x, exponent - 1.0) : -1.0;
    }
    return 0.0;
}

ValueFunction call_value(const ModelParams& params, double strike) {
    if (!(strike > 0.0))
        throw Error(Errc::bad_config, "call strike must be positive");
    const Roots roots = characteristic_roots(params);
    const double b = roots.gamma * strike / (roots.gamma - 1.0);
    ValueFunction vf;
    vf.payoff = call_payoff(strike);
    vf.params = params;
    vf.roots = roots;
    vf.threshold = b;
    vf.exponent = roots.gamma;
    vf.coefficient = (b - strike) * std::pow(b, -roots.gamma);
    return vf;
}

ValueFunction put_value(const ModelParams& params, double strike) {
    if (!(strike > 0.0))
        throw Error(Errc::bad_config, "put strike must be positive");
    const Roots roots = characteristic_roots(params);
    const double b = roots.eta * strike / (roots.eta - 1.0);
    ValueFunction vf;
    vf.payoff = put_payoff(strike);
    vf.params = params;
    vf.roots = roots;
    vf.threshold = b;
    vf.exponent = roots.eta;
    vf.coefficient = (strike - b) * std::pow(b, -roots.eta);
    return vf;
}

ValueFunction zero_value(const ModelParams& params) {
    ValueFunction vf;
    vf.payoff = zero_payoff();
    vf.params = params;
    vf.roots = characteristic_roots(params);
    return vf;
}

ValueFunction single_player_value(const ModelParams& params, const Payoff& payoff) {
    switch (payoff.kind) {
    case PayoffKind::call: return call_value(params, payoff.strike);
    case PayoffKind::put: return put_value(params, payoff.strike);
    case PayoffKind::zero: return zero_value(params);
    }
    return zero_value(params);
}

double lattice_oracle(const Payoff& payoff, const ModelParams& params, double x,
                      int steps, double horizon, double tail_tol) {
    if (payoff.kind == PayoffKind::zero) return 0.0;
    if (steps < 100)
        throw Error(Errc::bad_config, "lattice_oracle: need at least 100 steps");
    if (!(horizon > 0.0))
        throw Error(Errc::bad_config, "lattice_oracle: horizon must be positive");

    const double tail = payoff.kind == PayoffKind::call
                            ? x * std::exp((params.mu - params.r) * horizon)
                            : payoff.strike * std::exp(-params.r * horizon);
    if (tail > tail_tol)
        throw Error(Errc::insufficient_horizon,
                    "lattice_oracle: truncation bound exceeds requested tolerance");

    const int n = steps;
    const double dt = horizon / n;
    const double up = std::exp(params.sigma * std::sqrt(dt));
    const double dn = 1.0 / up;
    const double grow = std::exp(params.mu * dt);
    const double pu = (grow - dn) / (up - dn);
    if (!(pu > 0.0 && pu < 1.0))
        throw Error(Errc::bad_config, "lattice_oracle: step too coarse for these parameters");
    const double disc = std::exp(-params.r * dt);

    // Node j at level k holds S = x * up^(k - 2j). Work in log-price to keep
    // the payoff evaluation stable at deep levels.
    const double logx = std::log(x);
    const double logu = std::log(up);
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const double s = std::exp(logx + (n - 2 * j) * logu);
        v[static_cast<std::size_t>(j)] = payoff(s);
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j <= k; ++j) {
            const double cont = disc * (pu * v[static_cast<std::size_t>(j)] +
                                        (1.0 - pu) * v[static_cast<std::size_t>(j) + 1]);
            const double s = std::exp(logx + (k - 2 * j) * logu);
            v[static_cast<std::size_t>(j)] = std::max(cont, payoff(s));
        }
    }
    return v[0];
}

} // namespace stopgame
