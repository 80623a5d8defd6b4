#pragma once

#include "stopgame/equilibrium.hpp"
#include "stopgame/strategy.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stopgame {

struct SimConfig {
    double dt{1e-3};
    double horizon{1.0};
    std::size_t n_paths{0};
    std::uint64_t seed{0};
};

/// Exact-increment GBM path family: log X steps by Normal((mu - sigma^2/2) dt,
/// sigma^2 dt). Paths are materialized on demand from counter-derived
/// per-path substreams, so a fixed seed reproduces the set bitwise regardless
/// of how many workers consume it.
class PathSet {
public:
    PathSet(const ModelParams& params, double x0, const SimConfig& cfg);

    const ModelParams& params() const noexcept { return params_; }
    double x0() const noexcept { return x0_; }
    double dt() const noexcept { return cfg_.dt; }
    double horizon() const noexcept { return cfg_.horizon; }
    std::size_t n_paths() const noexcept { return cfg_.n_paths; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::uint64_t seed() const noexcept { return cfg_.seed; }

    /// Fill out (size n_steps()+1) with path i.
    void states(std::size_t i, std::span<double> out) const;

    struct Slice {
        std::size_t len{0};  // filled entries in out
        std::size_t hit1{kNever};
        std::size_t hit2{kNever};
    };
    /// Emit path i at every stride-th base step (out[j] = X_{j * stride * dt}).
    /// Stops after the first emitted point at or above level1, or once the
    /// point drops to floor_states[j] or below (pass empty to disable);
    /// records first-passage indices for level1 and level2 in strided units.
    Slice states_strided(std::size_t i, std::span<double> out, int stride,
                         double level1, double level2,
                         std::span<const double> floor_states) const;

    std::size_t first_hit(std::size_t i, double level) const;

    /// Throws Errc::horizon_too_short when fewer than 99% of paths reach
    /// `level` within the horizon while the discounted tail bound
    /// x0 e^{(mu-r)T} still exceeds tol.
    void verify_horizon(double level, double tol) const;

    double tail_bound() const noexcept;

private:
    ModelParams params_;
    double x0_;
    SimConfig cfg_;
    std::size_t n_steps_;
    double log_drift_, log_vol_;
};

PathSet simulate_paths(const ModelParams& params, double x0, double dt, double horizon,
                       std::size_t n, std::uint64_t seed);

enum class Estimator { indicator, formula };

struct McEstimate {
    double mean{0.0};
    double std_error{0.0};
    std::size_t n{0};
    Estimator mode{Estimator::indicator};
};

McEstimate reduce_samples(std::span<const double> samples, Estimator mode);

struct EstimateOptions {
    int threads{0};              // 0 = hardware concurrency
    double value_floor{0.0};     // truncate a path once e^{-rt} V^{g_1}(X_t) <= floor
    int stride{1};               // consume every stride-th grid point
    std::uint64_t game_seed{0};  // extra entropy for the theta/U substream only
};

struct GameEstimates {
    McEstimate j1_indicator, j2_indicator, j1_formula, j2_formula;
    /// max over paths and increase steps of |u2(X, Pi^1_-) - g2(X)|
    double support_violation_max{0.0};
    std::size_t denominator_skips{0};
    double hit_fraction_1{0.0}, hit_fraction_2{0.0};
    double tail_bound{0.0};
};

/// Both players' equilibrium payoff estimates by both estimators in a single
/// sweep (indicator draws live on a dedicated substream, so the estimators
/// see identical state paths).
GameEstimates estimate_game(const Solution& sol, const PathSet& paths,
                            const EstimateOptions& opt = {});

McEstimate estimate_J(int player, Estimator mode, const Solution& sol, const PathSet& paths,
                      const EstimateOptions& opt = {});

/// Indicator-mode payoff pair for one path, given realized stopping indices
/// (kNever = never) and competition draws. Simultaneous stops give Player 2
/// priority: Player 2 collects g2, Player 1 the consolation V^{h_1}.
struct IndicatorOutcome {
    double j1{0.0};
    double j2{0.0};
};
IndicatorOutcome indicator_payoffs(const Solution& sol, std::span<const double> path, double dt,
                                   std::size_t gamma1, std::size_t gamma2, bool theta1,
                                   bool theta2);

/// Verification processes along one path:
///   M1_t = e^{-rt}(1-p1 G2_t) u1(X_t, Pi^1_t) + p1 sum_{s<=t} e^{-rs} Vh1(X_s) dG2_s
///   M2_t = e^{-rt}(1-p2 G1_{t-}) u2(X_t, Pi^1_{t-}) + p2 sum_{s<t} e^{-rs} Vh2(X_s) dG1_s
/// u1/u2 scale factors support the deliberately-broken negative controls.
struct MPath {
    std::vector<double> m1, m2;
};
MPath build_M_path(const Solution& sol, std::span<const double> path,
                   const ControlPath& gamma1, const ControlPath& gamma2, double dt,
                   double u1_scale = 1.0, double u2_scale = 1.0);

struct CheckpointRow {
    int which{1}; // M^1 or M^2
    double t{0.0};
    double stopped_mean{0.0}, stopped_se{0.0};
    double unstopped_mean{0.0}, unstopped_se{0.0};
    double m0{0.0};
    bool martingale_ok{true};
    bool supermartingale_ok{true};
    bool monotone_ok{true}; // unstopped mean non-increasing vs previous checkpoint
};

struct DeviationRow {
    std::string id;
    int player{1};
    double estimate{0.0};
    double estimate_se{0.0}; // SE of the deviation estimate alone
    double std_error{0.0};   // SE of the paired (deviation - equilibrium) margin
    double equilibrium{0.0}; // equilibrium estimate on the same paths
    double margin{0.0};      // mean of the paired differences
    bool ok{true};
};

struct DiagnosticsReport {
    std::vector<CheckpointRow> checkpoints;
    std::vector<DeviationRow> deviations;
    bool pass{true};
};

struct DiagOptions {
    int threads{0};
    double u1_scale{1.0};
    double u2_scale{1.0};
};

/// Monte Carlo martingale/supermartingale checks for M^1, M^2 at the given
/// checkpoint times: stopped means flat at M_0 within 3 SE, unstopped means
/// at most M_0 + 3 SE and non-increasing within 3 SE of the paired
/// differences. Requires at least 1e4 paths.
DiagnosticsReport martingale_diagnostic(const Solution& sol, const PathSet& paths,
                                        std::span<const double> checkpoint_times,
                                        const DiagOptions& opt = {});

struct DeviationSpec {
    enum class Kind { threshold, immediate, never, randomized_u };
    Kind kind{Kind::immediate};
    double value{0.0}; // threshold state c, or the u of a randomized stop
    std::string label() const;
};

/// 12 hitting thresholds spanning (a, 1.2 b_g) plus immediate and never.
std::vector<DeviationSpec> default_deviations(const Solution& sol);

/// Estimates the deviator's payoff against the opponent's equilibrium control
/// for every deviation and flags estimates above the equilibrium value by
/// more than 3 SE.
DiagnosticsReport deviation_test(int player, const Solution& sol, const PathSet& paths,
                                 std::span<const DeviationSpec> deviations,
                                 const EstimateOptions& opt = {});

} // namespace stopgame
