#pragma once

#include "stopgame/equilibrium.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace stopgame {

inline constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

/// A nondecreasing randomized-stopping control sampled on a uniform time
/// grid, cadlag by convention (values[k] holds on [t_k, t_{k+1})), with
/// Gamma_{0-} = 0 and an explicit record of the terminal jump to 1.
struct ControlPath {
    std::vector<double> values;
    std::size_t jump_index{kNever};
    double pre_jump{0.0};
    double post_jump{0.0};

    std::size_t size() const noexcept { return values.size(); }
    double at(std::size_t k) const noexcept { return values[k]; }
    double left_limit(std::size_t k) const noexcept { return k == 0 ? 0.0 : values[k - 1]; }
    double increment(std::size_t k) const noexcept { return values[k] - left_limit(k); }
};

/// Adjusted belief Pi_t = p (1 - Gamma_t) / (1 - p Gamma_t), identically 1
/// when p = 1.
struct BeliefPath {
    std::vector<double> values;
};

/// Freeze-then-jump rule for the asymmetric game: Gamma^2 keeps its value on
/// (tau_{g_2}, tau_{g_1}) and jumps to 1 at tau_{g_1}. The running minimum is
/// evaluated at states capped at b_{g_2} so the overshoot of the detection
/// step does not leak past the freeze level.
struct HoldRule {
    std::size_t tau_g2{kNever};
    std::size_t tau_g1{kNever};
    double cap{std::numeric_limits<double>::infinity()}; // = b_{g_2}
};

/// Gamma^2_t = (p1 - p1 ^ m_t) / (p1 (1 - p1 ^ m_t)) with m_t the running
/// minimum of b along the sampled path; reflects (Pi^1, X) at the boundary.
ControlPath gamma2_from_boundary(std::span<const double> path, const Boundary& b, double p1,
                                 const HoldRule* hold = nullptr);

/// Gamma^1 for the symmetric regimes: a constant multiple of Gamma^2 - Gamma^2_0
/// before tau_g, then 1. The multiple is p1(1 - b(x0)^p1)/(p2(1-p1)) in the
/// martingale regime and p1/p2 in the ode regime.
ControlPath gamma1_sym(const ControlPath& gamma2, double x0, const Boundary& b,
                       double p1, double p2, std::size_t tau_g_index, BoundaryMode mode);

struct AsymIntegration {
    std::size_t denominator_skips{0};
    double max_gamma1_pre_jump{0.0};
};

/// Gamma^1 for the asymmetric regime: integrates
///   p2 (V^{h_2} - u2) dGamma^1 = p1 (1-p1) du2/dp1 (1-p2 Gamma^1)/(1-p1 Gamma^2)^2 dGamma^2
/// along points of increase of Gamma^2 (which sit on the boundary, so the
/// state argument is the boundary point b^{-1}(Pi^1)), then jumps to 1 at
/// tau_{g_2}. Midpoint substeps capped at 1e-4 of Gamma^1 movement.
ControlPath gamma1_asym(std::span<const double> path, const ControlPath& gamma2,
                        const EquilibriumValues& eq, double p1, double p2,
                        std::size_t tau_g2_index, AsymIntegration* stats = nullptr);

BeliefPath belief_path(double p, const ControlPath& gamma_other);

/// First grid index with Gamma > u (kNever if none). Monotone in u.
std::size_t randomized_stop(const ControlPath& control, double u);

} // namespace stopgame
