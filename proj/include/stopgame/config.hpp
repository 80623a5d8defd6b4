#pragma once

#include "stopgame/equilibrium.hpp"

#include <cstdint>
#include <string>

namespace stopgame {

/// One run of the game: model, payoffs, regime, simulation controls and
/// tabulation grid. Serialized as flat `key=value` lines with `#` comments;
/// parse(serialize(c)) is the identity on every field.
struct RunConfig {
    double mu{0.08};
    double sigma{0.01};
    double r{0.1};
    double x0{10.0};
    std::string mode{"martingale"}; // martingale | ode | asym
    double k1{3.0};
    double l1{4.0}; // consolation strike; 0 means zero consolation
    double k2{3.0};
    double l2{4.0};
    double p1{0.1};
    double p2{0.5};
    double dt{1e-3};
    double horizon{8.0};
    std::uint64_t paths{20000};
    std::uint64_t seed{1};
    double x_min{0.0}; // 0 = derive from the boundary
    double x_max{0.0};
    std::uint64_t x_points{200};
    std::string out_dir{"."};

    BoundaryMode boundary_mode() const;
    GameSpec to_game() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

} // namespace stopgame
