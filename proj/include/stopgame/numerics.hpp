#pragma once

#include <functional>
#include <vector>

namespace stopgame::num {

/// Root of f on [lo, hi] by bisection. Requires a sign change; refines until
/// the bracket width drops below xtol. Returns the bracket midpoint.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol);

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
/// Throws Errc::quadrature_failure when the recursion budget is exhausted
/// before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol);

/// Monotone cubic Hermite interpolant (Fritsch-Carlson tangents). Preserves
/// the monotonicity of the data; evaluation clamps to the end values outside
/// the node range.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    bool empty() const noexcept { return xs_.empty(); }
    const std::vector<double>& nodes() const noexcept { return xs_; }
    const std::vector<double>& values() const noexcept { return ys_; }

private:
    std::vector<double> xs_, ys_, slopes_;
};

} // namespace stopgame::num
