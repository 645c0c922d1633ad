#include <doctest.h>

#include <cmath>

#include "fd3m/errors.hpp"
#include "fd3m/problems.hpp"
#include "fd3m/rng.hpp"

using namespace fd3m;

namespace {

Eigen::VectorXd pt(double a) {
    Eigen::VectorXd x(1);
    x << a;
    return x;
}
Eigen::VectorXd pt(double a, double b) {
    Eigen::VectorXd x(2);
    x << a, b;
    return x;
}

// Finite-difference Laplacian of the closed-form u, cross-checking the
// symbolic source derivation.
double fd_source(const PdeProblem& p, const Eigen::VectorXd& x, double h = 1e-5) {
    double lap = 0.0;
    const double u0 = p.exact(x);
    for (int a = 0; a < p.dim(); ++a) {
        Eigen::VectorXd xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        lap += (p.exact(xp) - 2 * u0 + p.exact(xm)) / (h * h);
    }
    return lap + p.reaction_coeff() * u0;
}

} // namespace

TEST_CASE("poisson1d: values of u and f") {
    auto p = problem_1d_poisson();
    CHECK(p.exact(pt(0.1)) == doctest::Approx(1.0).epsilon(1e-12));   // sin(pi/2) + sin(3 pi)
    CHECK(std::abs(p.exact(pt(-1.0))) < 1e-12);                       // integer multiples of pi
    CHECK(p.source(pt(0.1)) == doctest::Approx(-25 * M_PI * M_PI).epsilon(1e-10));
}

TEST_CASE("poisson2d: values of u") {
    auto p = problem_2d_poisson();
    CHECK(std::abs(p.exact(pt(0.0, 0.0))) < 1e-14);
    const double want = std::sqrt(2.0) / 2.0 + 1.0; // sin(pi/4) + sin(pi/2) + sin(pi)
    CHECK(p.exact(pt(0.05, 0.0)) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("helmholtz2d: structural zeros of u") {
    auto p = problem_2d_helmholtz();
    RngStream rng(3);
    for (int t = 0; t < 20; ++t) CHECK(std::abs(p.exact(pt(rng.uniform(-1, 1), 0.0))) < 1e-12);
    CHECK(std::abs(p.exact(pt(0.5, 0.5))) < 1e-12); // sin(8 pi) = 0
    CHECK(p.wavenumber == doctest::Approx(16 * M_PI));
}

TEST_CASE("residual of the exact solution vanishes (symbolic jets)") {
    RngStream rng(21);
    for (auto* make : {problem_1d_poisson, problem_2d_poisson}) {
        auto p = make();
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXd x(p.dim());
            for (int a = 0; a < p.dim(); ++a) x[a] = rng.uniform(-1, 1);
            CHECK(std::abs(residual(p, p.exact_jet(x), x)) < 1e-8);
        }
    }
    // Helmholtz terms reach ~k^2 e^lambda, so the bound is relative to them.
    auto p = problem_2d_helmholtz();
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd x(2);
        x << rng.uniform(-1, 1), rng.uniform(-1, 1);
        const Jet j = p.exact_jet(x);
        const double scale = std::abs(j.laplacian()) + p.reaction_coeff() * std::abs(j.value) +
                             std::abs(p.source(x)) + 1.0;
        CHECK(std::abs(residual(p, j, x)) < 1e-6 * scale);
    }
}

TEST_CASE("residual operator values") {
    auto p = problem_1d_poisson();
    // u == 0, f == 0 gives zero residual
    PdeProblem zero = p;
    zero.source = [](const Eigen::VectorXd&) { return 0.0; };
    CHECK(residual(zero, Jet(1), pt(0.4)) == 0.0);

    // u == 1, Helmholtz k = 2, f == 0 at any x: residual = k^2
    PdeProblem h = problem_2d_helmholtz();
    h.wavenumber = 2.0;
    h.source = [](const Eigen::VectorXd&) { return 0.0; };
    CHECK(residual(h, Jet::constant(1.0, 2), pt(0.3, -0.8)) == doctest::Approx(4.0));
}

TEST_CASE("source cross-checks against finite differences of u") {
    RngStream rng(9);
    for (const auto& name : problem_names()) {
        auto p = problem_by_name(name);
        // FD truncation scales with the solution's fourth derivative, not
        // with the local |f|, so the relative tolerance uses the sampled
        // maximum of |f| as the scale.
        std::vector<Eigen::VectorXd> xs;
        double fmax = 1.0;
        for (int t = 0; t < 40; ++t) {
            Eigen::VectorXd x(p.dim());
            for (int a = 0; a < p.dim(); ++a) x[a] = rng.uniform(-0.95, 0.95);
            fmax = std::max(fmax, std::abs(p.source(x)));
            xs.push_back(std::move(x));
        }
        for (const auto& x : xs) CHECK(std::abs(p.source(x) - fd_source(p, x)) < 1e-6 * fmax);
    }
}

TEST_CASE("exact_jet agrees with finite differences of u") {
    RngStream rng(13);
    for (const auto& name : problem_names()) {
        auto p = problem_by_name(name);
        for (int t = 0; t < 25; ++t) {
            Eigen::VectorXd x(p.dim());
            for (int a = 0; a < p.dim(); ++a) x[a] = rng.uniform(-0.9, 0.9);
            const Jet j = p.exact_jet(x);
            CHECK(j.value == p.exact(x));
            const double h = 1e-6;
            for (int a = 0; a < p.dim(); ++a) {
                Eigen::VectorXd xp = x, xm = x;
                xp[a] += h;
                xm[a] -= h;
                const double g = (p.exact(xp) - p.exact(xm)) / (2 * h);
                CHECK(std::abs(j.grad[a] - g) < 1e-5 * (std::abs(g) + 1.0));
            }
        }
    }
}

TEST_CASE("registry rejects unknown names") {
    CHECK_THROWS_AS(problem_by_name("poisson3d"), ConfigError);
    CHECK(problem_names().size() == 3);
}

TEST_CASE("boundary data is the restriction of u") {
    auto p = problem_2d_poisson();
    RngStream rng(5);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x = pt(-1.0, rng.uniform(-1, 1));
        CHECK(p.boundary_value(x) == p.exact(x));
    }
}
