#include "stopgame/model.hpp"

#include "stopgame/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace stopgame;

TEST_CASE("validate accepts admissible parameters") {
    CHECK_NOTHROW(validate(0.08, 0.01, 0.1));
    CHECK_NOTHROW(validate(0.0, 1.4142135, 2.0));
    CHECK_NOTHROW(validate(-0.5, 0.3, 0.05));
}

TEST_CASE("validate rejects out-of-domain parameters") {
    CHECK_THROWS_AS(validate(0.1, 0.01, 0.1), Error);   // mu == r
    CHECK_THROWS_AS(validate(0.2, 0.01, 0.1), Error);   // mu > r
    CHECK_THROWS_AS(validate(0.0, 0.0, 0.1), Error);    // sigma == 0
    CHECK_THROWS_AS(validate(0.0, -1.0, 0.1), Error);   // sigma < 0
    CHECK_THROWS_AS(validate(-1.0, 1.0, -0.1), Error);  // r < 0
    CHECK_THROWS_AS(validate(-1.0, 1.0, 0.0), Error);   // r == 0 (closed forms degenerate)
    try {
        validate(0.1, 0.01, 0.1);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::drift_not_below_rate);
    }
}

TEST_CASE("characteristic roots: factorable case") {
    const ModelParams p = validate(0.0, std::sqrt(2.0), 2.0);
    const Roots roots = characteristic_roots(p);
    // z^2 - z - 2 = (z-2)(z+1)
    CHECK(std::abs(roots.gamma - 2.0) <= 1e-12);
    CHECK(std::abs(roots.eta + 1.0) <= 1e-12);
}

TEST_CASE("characteristic roots: cancellation-prone parameters") {
    const ModelParams p = validate(0.08, 0.01, 0.1);
    const Roots roots = characteristic_roots(p);
    // scaled equation z^2 + 1599 z - 2000 = 0
    CHECK(roots.gamma == doctest::Approx(1.2498048704102303).epsilon(1e-10));
    CHECK(roots.eta == doctest::Approx(-1600.2498048704101).epsilon(1e-12));
    CHECK(std::abs(characteristic_residual(p, roots.gamma)) <= 1e-12);
    CHECK(std::abs(characteristic_residual(p, roots.eta)) <= 1e-9 * std::abs(roots.eta));
}

TEST_CASE("characteristic roots: Vieta product") {
    const ModelParams p = validate(0.05, 0.2, 0.1);
    const Roots roots = characteristic_roots(p);
    CHECK(roots.gamma * roots.eta ==
          doctest::Approx(-2.0 * p.r / (p.sigma * p.sigma)).epsilon(1e-13));
}

TEST_CASE("characteristic roots: residual over random admissible triples") {
    // sigma bounded away from 0 keeps both roots moderate, so the 1e-12
    // absolute bound sits above the double-precision evaluation floor
    rng::Xoshiro256 gen(20240811, 0);
    for (int i = 0; i < 1000; ++i) {
        const double sigma = 0.1 + 1.9 * gen.uniform();
        const double r = 0.01 + 2.99 * gen.uniform();
        const double mu = r - 0.01 - 2.0 * gen.uniform();
        const ModelParams p = validate(mu, sigma, r);
        const Roots roots = characteristic_roots(p);
        CHECK(roots.gamma > 1.0);
        CHECK(roots.eta < 0.0);
        CHECK(std::abs(characteristic_residual(p, roots.gamma)) <= 1e-12);
        CHECK(std::abs(characteristic_residual(p, roots.eta)) <= 1e-12);
    }
}

TEST_CASE("power solutions satisfy the generator equation") {
    // moderate exponents so x^e stays representable over [0.1, 100]
    const ModelParams sets[] = {validate(0.0, std::sqrt(2.0), 2.0), validate(0.05, 0.4, 0.3),
                                validate(-0.2, 0.8, 1.0)};
    for (const ModelParams& p : sets) {
        const Roots roots = characteristic_roots(p);
        for (double e : {roots.gamma, roots.eta}) {
            for (int i = 0; i < 100; ++i) {
                const double x = 0.1 * std::pow(1000.0, i / 99.0); // [0.1, 100]
                const double f = std::pow(x, e);
                const double fp = e * std::pow(x, e - 1.0);
                const double fpp = e * (e - 1.0) * std::pow(x, e - 2.0);
                const double t1 = 0.5 * p.sigma * p.sigma * x * x * fpp;
                const double t2 = p.mu * x * fp;
                const double t3 = -p.r * f;
                const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
                CHECK(std::abs(t1 + t2 + t3) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("payoff evaluation") {
    const Payoff c = call_payoff(3.0);
    CHECK(c(5.0) == 2.0);
    CHECK(c(2.0) == 0.0);
    CHECK(zero_payoff()(7.0) == 0.0);
    CHECK(put_payoff(3.0)(2.0) == 1.0);
    CHECK(put_payoff(3.0)(4.0) == 0.0);
}

TEST_CASE("payoffs are nonnegative and 1-Lipschitz") {
    for (const Payoff& p : {call_payoff(2.0), put_payoff(2.0)}) {
        double prev = p(0.01);
        for (int i = 1; i <= 500; ++i) {
            const double x = 0.01 + 8.0 * i / 500.0;
            const double v = p(x);
            CHECK(v >= 0.0);
            CHECK(std::abs(v - prev) <= 8.0 / 500.0 + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("make_game validates the players") {
    const ModelParams p = validate(0.0, std::sqrt(2.0), 2.0);
    const PlayerSpec ok{call_payoff(3.0), call_payoff(4.0), 0.5};
    CHECK_NOTHROW(make_game(p, 5.0, ok, ok));
    // g must dominate h
    CHECK_THROWS_AS(make_game(p, 5.0, PlayerSpec{call_payoff(4.0), call_payoff(3.0), 0.5}, ok),
                    Error);
    CHECK_THROWS_AS(make_game(p, 5.0, PlayerSpec{call_payoff(3.0), put_payoff(2.0), 0.5}, ok),
                    Error);
    // probabilities in (0,1], at least one below 1
    CHECK_THROWS_AS(make_game(p, 5.0, PlayerSpec{call_payoff(3.0), zero_payoff(), 0.0}, ok),
                    Error);
    CHECK_THROWS_AS(make_game(p, 5.0, PlayerSpec{call_payoff(3.0), zero_payoff(), 1.1}, ok),
                    Error);
    const PlayerSpec certain{call_payoff(3.0), call_payoff(4.0), 1.0};
    CHECK_THROWS_AS(make_game(p, 5.0, certain, certain), Error);
    CHECK_NOTHROW(make_game(p, 5.0, ok, certain));
    // degenerate stopping payoff
    CHECK_THROWS_AS(make_game(p, 5.0, PlayerSpec{zero_payoff(), zero_payoff(), 0.5}, ok), Error);
    CHECK_THROWS_AS(make_game(p, -1.0, ok, ok), Error);
}
