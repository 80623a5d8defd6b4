#include "stopgame/numerics.hpp"

#include "stopgame/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace stopgame;

TEST_CASE("bisect finds a bracketed root") {
    const double root = num::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-13);
    CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(num::bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), Error);
}

TEST_CASE("adaptive quadrature on smooth and near-singular integrands") {
    const double a = num::integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
    CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
    const double b = num::integrate([](double x) { return std::exp(-x); }, 0.0, 10.0, 1e-12);
    CHECK(b == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-11));
    // integrable singularity at 0, approached from a small offset
    const double c =
        num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0, 1e-10);
    CHECK(c == doctest::Approx(2.0 - 2e-6).epsilon(1e-7));
}

TEST_CASE("adaptive quadrature reports an exhausted budget") {
    // divergent-scale integrand: the refinement budget runs out before the
    // tolerance is reached
    CHECK_THROWS_AS(num::integrate([](double x) { return 1.0 / x; }, 1e-300, 1.0, 1e-14), Error);
    try {
        num::integrate([](double x) { return 1.0 / x; }, 1e-300, 1.0, 1e-14);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::quadrature_failure);
    }
}

TEST_CASE("monotone cubic interpolation") {
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> ys{1.0, 0.8, 0.3, 0.05, 0.0};
    const num::MonotoneCubic f(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(f(xs[i]) == doctest::Approx(ys[i]));
    double prev = f(0.0);
    for (int i = 1; i <= 400; ++i) {
        const double v = f(4.0 * i / 400.0);
        CHECK(v <= prev + 1e-12); // preserves monotonicity
        prev = v;
    }
    CHECK(f(-1.0) == ys.front());
    CHECK(f(9.0) == ys.back());
}

TEST_CASE("monotone cubic reproduces smooth functions accurately") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 200; ++i) {
        const double x = 1.0 + i / 200.0;
        xs.push_back(x);
        ys.push_back(1.0 / x);
    }
    const num::MonotoneCubic f(xs, ys);
    for (int i = 0; i < 50; ++i) {
        const double x = 1.0 + (i + 0.37) / 50.0 * 0.96;
        CHECK(f(x) == doctest::Approx(1.0 / x).epsilon(2e-7));
    }
}
