#pragma once

#include <stdexcept>
#include <string>

namespace stopgame {

enum class Errc {
    non_positive_sigma,
    drift_not_below_rate,
    negative_rate,
    insufficient_horizon,
    inclusion_violated,
    no_root,
    quadrature_failure,
    ordering_violated,
    out_of_range,
    factor_out_of_range,
    grid_mismatch,
    horizon_too_short,
    bad_config,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace stopgame
