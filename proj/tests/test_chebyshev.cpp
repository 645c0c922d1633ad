#include <doctest.h>

#include <cmath>

#include "fd3m/chebyshev.hpp"
#include "fd3m/rng.hpp"

using namespace fd3m;

TEST_CASE("chebyshev reproduces a polynomial exactly") {
    auto f = [](double t) { return 2 * t * t * t - t + 0.5; };
    auto s = ChebyshevSeries::fit(f, -1.0, 1.0, 8);
    RngStream rng(4);
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(-1, 1);
        double v, d1, d2;
        s.eval(t, v, d1, d2);
        CHECK(v == doctest::Approx(f(t)).epsilon(1e-13));
        CHECK(d1 == doctest::Approx(6 * t * t - 1).epsilon(1e-12));
        CHECK(d2 == doctest::Approx(12 * t).epsilon(1e-11));
    }
}

TEST_CASE("chebyshev derivatives of sin on a shifted interval") {
    auto f = [](double t) { return std::sin(3 * t + 1); };
    auto s = ChebyshevSeries::fit(f, -2.0, 1.0, 48);
    RngStream rng(5);
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(-2, 1);
        double v, d1, d2;
        s.eval(t, v, d1, d2);
        CHECK(std::abs(v - f(t)) < 1e-12);
        CHECK(std::abs(d1 - 3 * std::cos(3 * t + 1)) < 1e-10);
        CHECK(std::abs(d2 + 9 * std::sin(3 * t + 1)) < 1e-8);
    }
}

TEST_CASE("chebyshev resolves oscillatory traces at tabulation degree") {
    // Scale comparable to the highest-frequency interface content the 2D
    // runs tabulate.
    const double w = 2 * M_PI * 20;
    auto f = [&](double t) { return std::cos(w * t) + 0.3 * t; };
    auto s = ChebyshevSeries::fit(f, -1.0, 1.0, 512);
    RngStream rng(6);
    double vmax = 0, d2max = 0;
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(-1, 1);
        double v, d1, d2;
        s.eval(t, v, d1, d2);
        vmax = std::max(vmax, std::abs(v - f(t)));
        d2max = std::max(d2max, std::abs(d2 + w * w * std::cos(w * t)));
    }
    CHECK(vmax < 1e-11);
    CHECK(d2max / (w * w) < 1e-9); // relative to the derivative scale
}

TEST_CASE("chebyshev endpoints are interpolated") {
    auto f = [](double t) { return std::exp(t) * std::sin(5 * t); };
    auto s = ChebyshevSeries::fit(f, 0.25, 0.75, 64);
    CHECK(s.value(0.25) == doctest::Approx(f(0.25)).epsilon(1e-13));
    CHECK(s.value(0.75) == doctest::Approx(f(0.75)).epsilon(1e-13));
}
