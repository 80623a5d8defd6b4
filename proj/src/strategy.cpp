#include "stopgame/strategy.hpp"

#include <algorithm>
#include <cmath>

namespace stopgame {

ControlPath gamma2_from_boundary(std::span<const double> path, const Boundary& b, double p1,
                                 const HoldRule* hold) {
    if (!(p1 > 0.0 && p1 < 1.0))
        throw Error(Errc::out_of_range, "gamma2: p1 must lie in (0,1)");
    const std::size_t n = path.size();
    ControlPath cp;
    cp.values.resize(n);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (hold && k >= hold->tau_g1) {
            if (cp.jump_index == kNever) {
                cp.jump_index = k;
                cp.pre_jump = k > 0 ? cp.values[k - 1] : 0.0;
                cp.post_jump = 1.0;
            }
            cp.values[k] = 1.0;
            continue;
        }
        if (hold && k > hold->tau_g2) {
            cp.values[k] = cp.values[k - 1];
            continue;
        }
        m = std::min(m, b(hold ? std::min(path[k], hold->cap) : path[k]));
        const double mm = std::min(p1, m);
        const double v = (p1 - mm) / (p1 * (1.0 - mm));
        cp.values[k] = v;
        if (!hold && v >= 1.0 && cp.jump_index == kNever) {
            cp.jump_index = k;
            cp.pre_jump = k > 0 ? cp.values[k - 1] : 0.0;
            cp.post_jump = 1.0;
        }
    }
    return cp;
}

ControlPath gamma1_sym(const ControlPath& gamma2, double x0, const Boundary& b,
                       double p1, double p2, std::size_t tau_g_index, BoundaryMode mode) {
    if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 <= 1.0 && p1 <= p2))
        throw Error(Errc::bad_config, "gamma1_sym: need 0 < p1 <= p2 <= 1, p1 < 1");
    const double factor = mode == BoundaryMode::martingale
                              ? p1 * (1.0 - std::min(b(x0), p1)) / (p2 * (1.0 - p1))
                              : p1 / p2;
    const std::size_t n = gamma2.size();
    ControlPath cp;
    cp.values.resize(n);
    const double g0 = n > 0 ? gamma2.values[0] : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k >= tau_g_index) {
            if (cp.jump_index == kNever) {
                cp.jump_index = k;
                // left limit at tau_g: the factor formula evaluated at the
                // completed opponent control (continuous up to the jump)
                cp.pre_jump = std::min(factor * (gamma2.values[k] - g0), 1.0);
                cp.post_jump = 1.0;
            }
            cp.values[k] = 1.0;
            continue;
        }
        const double v = factor * (gamma2.values[k] - g0);
        if (v > 1.0 + 1e-9)
            throw Error(Errc::factor_out_of_range, "gamma1_sym: control exceeds 1 before tau_g");
        cp.values[k] = std::min(v, 1.0);
    }
    return cp;
}

namespace {

// Belief recovered from the control: on the support of dGamma^2 the running
// minimum satisfies m = Pi = p1 (1 - Gamma^2)/(1 - p1 Gamma^2).
double belief_of(double p1, double g2) { return p1 * (1.0 - g2) / (1.0 - p1 * g2); }

} // namespace

ControlPath gamma1_asym(std::span<const double> path, const ControlPath& gamma2,
                        const EquilibriumValues& eq, double p1, double p2,
                        std::size_t tau_g2_index, AsymIntegration* stats) {
    if (path.size() != gamma2.size())
        throw Error(Errc::grid_mismatch, "gamma1_asym: path and control grids differ");
    if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 <= 1.0 && p1 <= p2))
        throw Error(Errc::bad_config, "gamma1_asym: need 0 < p1 <= p2 <= 1, p1 < 1");
    const std::size_t n = path.size();
    ControlPath cp;
    cp.values.resize(n);
    if (n == 0) return cp;
    if (tau_g2_index == 0) {
        std::fill(cp.values.begin(), cp.values.end(), 1.0);
        cp.jump_index = 0;
        cp.pre_jump = 0.0;
        cp.post_jump = 1.0;
        return cp;
    }
    cp.values[0] = 0.0; // Gamma^1_0 = 0; the t=0 mass of Gamma^2 drives nothing

    // dGamma^1 = W(m) (1 - p2 Gamma^1)/p2 * (-dm) along points of increase,
    // the control ODE written in the running-minimum clock (state = b^{-1}(m)).
    const auto rhs = [&](double m, double g1) {
        return eq.w_coefficient(m) * (1.0 - p2 * g1) / p2;
    };

    double g1 = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const bool jump_here = k >= tau_g2_index;
        if (k > tau_g2_index || (jump_here && cp.jump_index != kNever)) {
            cp.values[k] = 1.0;
            continue;
        }
        const double dg2 = gamma2.values[k] - gamma2.values[k - 1];
        if (dg2 > 0.0) {
            const double m_hi = belief_of(p1, gamma2.values[k - 1]);
            const double m_lo = belief_of(p1, gamma2.values[k]);
            const double span = m_hi - m_lo;
            if (span > 0.0) {
                const double est = std::abs(rhs(m_hi, g1));
                std::size_t nsub = static_cast<std::size_t>(est * span / 1e-4) + 1;
                nsub = std::min<std::size_t>(nsub, 200000);
                const double dm = span / static_cast<double>(nsub);
                double m = m_hi;
                for (std::size_t j = 0; j < nsub; ++j) {
                    const double k1 = rhs(m, g1);
                    const double k2 = rhs(m - 0.5 * dm, g1 + 0.5 * dm * k1);
                    if (!std::isfinite(k2)) {
                        if (stats) ++stats->denominator_skips;
                    } else {
                        g1 = std::min(g1 + dm * k2, 1.0);
                    }
                    m -= dm;
                }
            }
        }
        if (jump_here) {
            // tau_{g_2}: integrate the mass its own step releases (the capped
            // final sliver of Gamma^2), record the left limit, then jump to 1
            cp.jump_index = k;
            cp.pre_jump = g1;
            cp.post_jump = 1.0;
            cp.values[k] = 1.0;
            continue;
        }
        cp.values[k] = g1;
        if (stats) stats->max_gamma1_pre_jump = std::max(stats->max_gamma1_pre_jump, g1);
    }
    return cp;
}

BeliefPath belief_path(double p, const ControlPath& gamma_other) {
    BeliefPath bp;
    bp.values.resize(gamma_other.size());
    if (p == 1.0) {
        std::fill(bp.values.begin(), bp.values.end(), 1.0);
        return bp;
    }
    for (std::size_t k = 0; k < gamma_other.size(); ++k) {
        const double g = gamma_other.values[k];
        bp.values[k] = p * (1.0 - g) / (1.0 - p * g);
    }
    return bp;
}

std::size_t randomized_stop(const ControlPath& control, double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw Error(Errc::out_of_range, "randomized_stop: u must lie in [0,1)");
    const auto it = std::upper_bound(control.values.begin(), control.values.end(), u);
    if (it == control.values.end()) return kNever;
    return static_cast<std::size_t>(it - control.values.begin());
}

} // namespace stopgame
