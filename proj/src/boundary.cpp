#include "stopgame/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stopgame {

namespace {

constexpr std::size_t kTableSize = 2048;

} // namespace

double Boundary::closed_form(double x) const {
    if (x >= bg_) return 0.0;
    if (x <= a_) return 1.0;
    const double vg = vg_(x);
    const double vh = vh_(x);
    const double g = g_(x);
    if (g < vh) return 1.0;
    const double denom = vg - vh;
    if (!(denom > 0.0)) return 1.0;
    return std::clamp((vg - g) / denom, 0.0, 1.0);
}

double Boundary::integrand(double y) const {
    // (g/psi)' psi = 1 - gamma + gamma K / y for g = (y-K)^+ above K
    const double num = 1.0 - gamma_ + gamma_ * strike_ / y;
    const double den = y - strike_ - vh_(y);
    return num / den;
}

double Boundary::operator()(double x) const {
    if (mode_ != BoundaryMode::ode) return closed_form(x);
    if (x >= bg_) return 0.0;
    if (x <= a_ + delta_) return 1.0;
    return std::clamp(table_(std::log(x)), 0.0, 1.0);
}

double Boundary::quadrature_eval(double x, double tol) const {
    if (mode_ != BoundaryMode::ode) return closed_form(x);
    if (x >= bg_) return 0.0;
    if (x <= a_ + delta_) return 1.0;
    const double integral =
        num::integrate([this](double y) { return integrand(y); }, x, bg_, tol);
    return 1.0 - std::exp(-integral);
}

double Boundary::inverse(double p, double xtol) const {
    if (!(p > 0.0 && p < 1.0))
        throw Error(Errc::out_of_range, "boundary inverse: p must lie in (0,1)");
    const double lo = mode_ == BoundaryMode::ode ? a_ + delta_ : a_;
    return num::bisect([this, p](double x) { return (*this)(x) - p; }, lo, bg_, xtol);
}

void Boundary::build_inverse_table() {
    constexpr std::size_t n = 4096;
    const double lo = a_ + std::max(delta_, 1e-9 * (bg_ - a_));
    const double hi = bg_ * (1.0 - 1e-12) + a_ * 1e-12;
    std::vector<double> ps, xs;
    ps.reserve(n);
    xs.reserve(n);
    double prev = 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double p = (*this)(x);
        if (!(p > 0.0 && p < 1.0) || p >= prev) continue;
        prev = p;
        ps.push_back(p);
        xs.push_back(x);
    }
    std::reverse(ps.begin(), ps.end());
    std::reverse(xs.begin(), xs.end());
    inverse_ = num::MonotoneCubic(std::move(ps), std::move(xs));
}

double Boundary::state_at(double p) const {
    if (p <= 0.0) return bg_;
    if (p >= 1.0) return a_;
    if (inverse_.empty()) return inverse(p, 1e-10);
    if (p < inverse_.nodes().front()) {
        // tail toward b_g, locally linear in the closed-form modes
        return inverse_.values().front() +
               (bg_ - inverse_.values().front()) * (1.0 - p / inverse_.nodes().front());
    }
    return inverse_(p);
}

double Boundary::derivative(double x) const {
    if (!(x > a_ && x < bg_)) return 0.0;
    if (mode_ == BoundaryMode::ode) {
        // From the boundary ODE: b' = -(1-b)(g/psi)' psi / (g - V^h).
        const double one_minus_b = 1.0 - (*this)(x);
        const double num = 1.0 - gamma_ + gamma_ * strike_ / x;
        const double den = x - strike_ - vh_(x);
        return -one_minus_b * num / den;
    }
    const double vg = vg_(x);
    const double vh = vh_(x);
    const double g = g_(x);
    const double dvg = vg_.derivative(x);
    const double dvh = vh_.derivative(x);
    const double dg = g_.slope(x);
    const double den = vg - vh;
    return ((dvg - dg) * den - (vg - g) * (dvg - dvh)) / (den * den);
}

double find_touch_point(const Payoff& g, const ValueFunction& vh, double lo, double hi) {
    if (vh.is_zero()) return g.strike;
    const auto f = [&](double x) { return vh(x) - g(x); };
    const double a =
        num::bisect(f, lo, hi, 1e-12 * std::max(1.0, hi)); // throws no_root without a sign change
    return a;
}

Boundary martingale_boundary(const ValueFunction& vg, const ValueFunction& vh, const Payoff& g) {
    if (g.kind != PayoffKind::call || vg.payoff.kind != PayoffKind::call)
        throw Error(Errc::bad_config, "martingale boundary: call stopping payoff required");
    if (vh.payoff.kind == PayoffKind::call && vh.threshold < vg.threshold)
        throw Error(Errc::inclusion_violated,
                    "martingale boundary: consolation threshold below stopping threshold");
    if (vh.payoff.kind == PayoffKind::put)
        throw Error(Errc::inclusion_violated,
                    "martingale boundary: put consolation breaks the inclusion condition");
    Boundary b;
    b.mode_ = BoundaryMode::martingale;
    b.vg_ = vg;
    b.vh_ = vh;
    b.g_ = g;
    b.bg_ = vg.threshold;
    b.a_ = find_touch_point(g, vh, g.strike, vg.threshold);
    b.build_inverse_table();
    return b;
}

Boundary asym_boundary(const ValueFunction& vg1, const ValueFunction& vh1, const Payoff& g1,
                       double a2, double bg2) {
    if (g1.kind != PayoffKind::call)
        throw Error(Errc::bad_config, "asym boundary: call stopping payoff required");
    Boundary b;
    b.mode_ = BoundaryMode::asym;
    b.vg_ = vg1;
    b.vh_ = vh1;
    b.g_ = g1;
    b.bg_ = vg1.threshold;
    b.a_ = find_touch_point(g1, vh1, g1.strike, vg1.threshold);
    if (!(a2 <= b.a_ && b.a_ < bg2))
        throw Error(Errc::ordering_violated, "asym boundary: need a2 <= a1 < bg2");
    b.build_inverse_table();
    return b;
}

Boundary ode_boundary(const ModelParams& params, double strike, const ValueFunction& vh) {
    if (vh.payoff.kind == PayoffKind::put)
        throw Error(Errc::bad_config, "ode boundary: consolation must stay below the call payoff");
    if (vh.payoff.kind == PayoffKind::call && !(vh.payoff.strike > strike))
        throw Error(Errc::bad_config, "ode boundary: consolation strike must exceed g strike");
    const Roots roots = characteristic_roots(params);
    const ValueFunction vg = call_value(params, strike);

    Boundary b;
    b.mode_ = BoundaryMode::ode;
    b.vg_ = vg;
    b.vh_ = vh;
    b.g_ = call_payoff(strike);
    b.bg_ = vg.threshold;
    b.gamma_ = roots.gamma;
    b.strike_ = strike;
    b.a_ = find_touch_point(b.g_, vh, strike, vg.threshold);
    b.delta_ = 1e-6 * (b.bg_ - b.a_);

    // Cumulative quadrature from b_g down over log-spaced nodes; the integrand
    // blows up like 1/(y-a) toward the touch point, which the delta clamp and
    // the adaptive rule absorb.
    const double t_lo = std::log(b.a_ + b.delta_);
    const double t_hi = std::log(b.bg_);
    std::vector<double> ts(kTableSize), bs(kTableSize);
    for (std::size_t i = 0; i < kTableSize; ++i)
        ts[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) /
                           static_cast<double>(kTableSize - 1);
    const auto f = [&b](double y) { return b.integrand(y); };
    double acc = 0.0;
    bs[kTableSize - 1] = 0.0;
    for (std::size_t i = kTableSize - 1; i-- > 0;) {
        acc += num::integrate(f, std::exp(ts[i]), std::exp(ts[i + 1]), 1e-12);
        bs[i] = 1.0 - std::exp(-acc);
    }
    b.table_ = num::MonotoneCubic(std::move(ts), std::move(bs));
    b.build_inverse_table();
    return b;
}

double ode_residual(const Boundary& b, const Payoff& g, const Roots& roots,
                    const ValueFunction& vh, double x) {
    const double a = b.touch_a();
    const double bg = b.upper_bg();
    if (!(x > a && x < bg))
        throw Error(Errc::out_of_range, "ode_residual: x outside (a, b_g)");
    const double h = 1e-5 * (bg - a);
    const auto f = [&b](double y) { return b.quadrature_eval(y, 1e-12); };

    double db;
    if (x + 2.0 * h >= bg) {
        // 5-point backward stencil
        db = (25.0 * f(x) - 48.0 * f(x - h) + 36.0 * f(x - 2.0 * h) -
              16.0 * f(x - 3.0 * h) + 3.0 * f(x - 4.0 * h)) /
             (12.0 * h);
    } else if (x - 2.0 * h <= a) {
        db = (-25.0 * f(x) + 48.0 * f(x + h) - 36.0 * f(x + 2.0 * h) +
              16.0 * f(x + 3.0 * h) - 3.0 * f(x + 4.0 * h)) /
             (12.0 * h);
    } else {
        db = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) /
             (12.0 * h);
    }
    const double K = g.strike;
    const double dgpsi_psi = 1.0 - roots.gamma + roots.gamma * K / x;
    return std::abs((1.0 - f(x)) * dgpsi_psi + (g(x) - vh(x)) * db);
}

} // namespace stopgame
