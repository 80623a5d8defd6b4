#include "stopgame/single.hpp"

#include "stopgame/rng.hpp"
#include "stopgame/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace stopgame;

namespace {
const ModelParams kWorked = validate(0.0, std::sqrt(2.0), 2.0);   // gamma=2, eta=-1
const ModelParams kFigure1 = validate(0.08, 0.01, 0.1);
} // namespace

TEST_CASE("perpetual call closed form") {
    const ValueFunction v = call_value(kWorked, 1.0);
    CHECK(v.threshold == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(v(1.0) == doctest::Approx(0.25).epsilon(1e-14)); // x^2/4 below threshold
    CHECK(v(3.0) == 2.0);                                   // exercise region

    const ValueFunction f = call_value(kFigure1, 3.0);
    CHECK(f.threshold == doctest::Approx(15.009373536526295).epsilon(1e-9));

    // value matching at the threshold, exactly
    for (double k : {0.5, 1.0, 3.0}) {
        const ValueFunction u = call_value(kFigure1, k);
        CHECK(u(u.threshold) == doctest::Approx(u.threshold - k).epsilon(1e-14));
    }
}

TEST_CASE("perpetual put closed form") {
    const ValueFunction v = put_value(kWorked, 1.0);
    CHECK(v.threshold == doctest::Approx(0.5).epsilon(1e-14)); // eta K/(eta-1)
    CHECK(v(1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(v(v.threshold) == doctest::Approx(1.0 - v.threshold).epsilon(1e-14));
    CHECK(v(1e9) <= 1e-8); // vanishes at infinity
}

TEST_CASE("value_at piecewise evaluation") {
    const ValueFunction v = call_value(kWorked, 3.0); // b_g = 6, V = x^2/12 below
    CHECK(v(5.0) == doctest::Approx(25.0 / 12.0).epsilon(1e-14));
    CHECK(v(6.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(zero_value(kWorked)(7.0) == 0.0);
}

TEST_CASE("smooth pasting with analytic derivatives") {
    for (const ValueFunction& v :
         {call_value(kWorked, 3.0), call_value(kFigure1, 3.0), put_value(kWorked, 1.0)}) {
        const double continuation = v.derivative(v.threshold);
        const double stopped = v.payoff.slope(v.threshold + (v.payoff.kind == PayoffKind::call
                                                                 ? 1e-9
                                                                 : -1e-9));
        CHECK(std::abs(continuation - stopped) <= 1e-9);
    }
}

TEST_CASE("value dominates payoff on a wide grid") {
    for (const ValueFunction& v : {call_value(kWorked, 3.0), put_value(kWorked, 1.0),
                                   call_value(kFigure1, 3.0)}) {
        for (int i = 0; i < 1000; ++i) {
            const double x = v.threshold * 0.01 * std::pow(1000.0, i / 999.0);
            CHECK(v(x) >= v.payoff(x) - 1e-12 * std::max(1.0, v(x)));
        }
    }
}

TEST_CASE("call value is nondecreasing and convex") {
    const ValueFunction v = call_value(kWorked, 3.0);
    const int n = 400;
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) vals[i] = v(0.5 + 9.0 * i / n);
    for (int i = 1; i <= n; ++i) CHECK(vals[i] >= vals[i - 1] - 1e-12);
    for (int i = 1; i < n; ++i)
        CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-10);
}

TEST_CASE("lattice oracle approximates the perpetual values") {
    const double call = lattice_oracle(call_payoff(1.0), kWorked, 1.0, 5000, 10.0);
    CHECK(std::abs(call - 0.25) <= 1e-3);
    const double put = lattice_oracle(put_payoff(1.0), kWorked, 1.0, 5000, 10.0);
    CHECK(std::abs(put - 0.25) <= 1e-3);
    CHECK(lattice_oracle(zero_payoff(), kWorked, 1.0, 500, 10.0) == 0.0);
    // deep in the exercise region the value is the payoff
    const double deep = lattice_oracle(call_payoff(1.0), kWorked, 10.0, 2000, 10.0);
    CHECK(deep == doctest::Approx(9.0).epsilon(5e-3));
}

TEST_CASE("lattice oracle refuses an insufficient horizon") {
    const ModelParams slow = validate(0.0, 0.3, 0.1);
    CHECK_THROWS_AS(lattice_oracle(call_payoff(1.0), slow, 1.0, 500, 1.0), Error);
    try {
        lattice_oracle(call_payoff(1.0), slow, 1.0, 500, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_horizon);
    }
    CHECK_THROWS_AS(lattice_oracle(call_payoff(1.0), kWorked, 1.0, 50, 10.0), Error); // steps
}

TEST_CASE("closed forms agree with the lattice oracle on random inputs") {
    rng::Xoshiro256 gen(555, 0);
    for (int i = 0; i < 20; ++i) {
        const double sigma = 0.5 + 0.8 * gen.uniform();
        const double r = 1.0 + 1.5 * gen.uniform();
        const double mu = r - 1.0 - gen.uniform();
        const double strike = 0.5 + 2.5 * gen.uniform();
        const ModelParams p = validate(mu, sigma, r);
        const bool use_call = (i % 2) == 0;
        const ValueFunction v =
            use_call ? call_value(p, strike) : put_value(p, strike);
        const double x = use_call ? strike * (0.4 + 0.5 * gen.uniform())
                                  : strike * (1.0 + 1.5 * gen.uniform());
        const double scale = std::max(v(x), 0.05 * strike);
        const double decay = std::log(std::max(x, strike) / (1e-5 * scale));
        const double horizon = std::max(6.0, decay / (use_call ? (r - mu) : r));
        const int steps = static_cast<int>(std::min(12000.0, std::max(4000.0, horizon / 1.5e-3)));
        const double lat = lattice_oracle(v.payoff, p, x, steps, horizon, 2e-4 * scale);
        CHECK(std::abs(lat - v(x)) <= 5e-3 * std::max(scale, 1e-6));
    }
}

TEST_CASE("discounted value process is a supermartingale, martingale when stopped") {
    // e^{-rt} V(X_t): mean at checkpoints stays below V(x0); the version
    // stopped at the threshold-hitting time stays flat.
    const ValueFunction v = call_value(kWorked, 1.0); // threshold 2
    const double x0 = 1.0;
    const double horizon = 3.0, dt = 2e-3;
    const std::size_t n = 20000;
    const PathSet ps(kWorked, x0, SimConfig{dt, horizon, n, 987654321});
    const std::size_t ns = ps.n_steps();
    const std::size_t cps[3] = {ns / 4, ns / 2, ns};
    std::vector<double> xs(ns + 1);
    std::vector<std::vector<double>> un(3), st(3);
    for (auto& v_ : un) v_.reserve(n);
    for (auto& v_ : st) v_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ps.states(i, xs);
        std::size_t hit = kNever;
        for (std::size_t k = 0; k <= ns; ++k)
            if (xs[k] >= v.threshold) {
                hit = k;
                break;
            }
        for (int j = 0; j < 3; ++j) {
            const std::size_t k = cps[j];
            const std::size_t ks = std::min(k, hit);
            un[j].push_back(std::exp(-kWorked.r * k * dt) * v(xs[k]));
            st[j].push_back(std::exp(-kWorked.r * ks * dt) * v(xs[ks]));
        }
    }
    const double v0 = v(x0);
    for (int j = 0; j < 3; ++j) {
        const auto u = reduce_samples(un[j], Estimator::formula);
        const auto s = reduce_samples(st[j], Estimator::formula);
        CHECK(u.mean <= v0 + 3.0 * u.std_error);
        CHECK(std::abs(s.mean - v0) <= 3.0 * std::max(s.std_error, 1e-12));
    }
}
