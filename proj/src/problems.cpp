#include "fd3m/problems.hpp"

#include <cmath>

#include "fd3m/errors.hpp"

namespace fd3m {

double residual(const PdeProblem& problem, const Jet& jet, const Eigen::VectorXd& x) {
    return jet.laplacian() + problem.reaction_coeff() * jet.value - problem.source(x);
}

PdeProblem problem_1d_poisson() {
    PdeProblem p;
    p.name = "poisson1d";
    p.domain = BoxDomain::interval(-1.0, 1.0);
    p.op = PdeOperator::poisson;
    const double a = 5.0 * M_PI, b = 30.0 * M_PI;
    p.exact = [=](const Eigen::VectorXd& x) { return std::sin(a * x[0]) + std::sin(b * x[0]); };
    p.exact_jet = [=](const Eigen::VectorXd& x) {
        Jet j(1);
        j.value = std::sin(a * x[0]) + std::sin(b * x[0]);
        j.grad[0] = a * std::cos(a * x[0]) + b * std::cos(b * x[0]);
        j.lap_diag[0] = -a * a * std::sin(a * x[0]) - b * b * std::sin(b * x[0]);
        return j;
    };
    p.source = [=](const Eigen::VectorXd& x) {
        return -a * a * std::sin(a * x[0]) - b * b * std::sin(b * x[0]);
    };
    return p;
}

namespace {
// Modes (a_i, b_i) of sin(a pi x1) cos(b pi x2) in the 2D diffusion benchmark.
constexpr double kPoisson2dModes[3][2] = {{5.0, 3.0}, {10.0, 2.0}, {20.0, 1.0}};
} // namespace

PdeProblem problem_2d_poisson() {
    PdeProblem p;
    p.name = "poisson2d";
    p.domain = BoxDomain::square(-1.0, 1.0);
    p.op = PdeOperator::poisson;
    p.exact = [](const Eigen::VectorXd& x) {
        double u = 0.0;
        for (const auto& m : kPoisson2dModes)
            u += std::sin(m[0] * M_PI * x[0]) * std::cos(m[1] * M_PI * x[1]);
        return u;
    };
    p.exact_jet = [](const Eigen::VectorXd& x) {
        Jet j(2);
        for (const auto& m : kPoisson2dModes) {
            const double am = m[0] * M_PI, bm = m[1] * M_PI;
            const double s1 = std::sin(am * x[0]), c1 = std::cos(am * x[0]);
            const double s2 = std::sin(bm * x[1]), c2 = std::cos(bm * x[1]);
            j.value += s1 * c2;
            j.grad[0] += am * c1 * c2;
            j.grad[1] += -bm * s1 * s2;
            j.lap_diag[0] += -am * am * s1 * c2;
            j.lap_diag[1] += -bm * bm * s1 * c2;
        }
        return j;
    };
    p.source = [](const Eigen::VectorXd& x) {
        double f = 0.0;
        for (const auto& m : kPoisson2dModes)
            f += -(m[0] * m[0] + m[1] * m[1]) * M_PI * M_PI * std::sin(m[0] * M_PI * x[0]) *
                 std::cos(m[1] * M_PI * x[1]);
        return f;
    };
    return p;
}

PdeProblem problem_2d_helmholtz() {
    PdeProblem p;
    p.name = "helmholtz2d";
    p.domain = BoxDomain::square(-1.0, 1.0);
    p.op = PdeOperator::helmholtz;
    p.wavenumber = 16.0 * M_PI;
    const double lambda = 0.75;
    const double alpha = 2.0 * M_PI;  // envelope frequency
    const double beta = 16.0 * M_PI;  // oscillation along x1
    const double gamma = 1.0 * M_PI;  // oscillation along x2

    // u = A(x1) S2(x2) with A = exp(lambda cos^2(alpha x1)) sin(beta x1).
    struct Axis1 {
        double A, dA, ddA;
    };
    auto axis1 = [=](double x1) {
        const double c = std::cos(alpha * x1);
        const double E = std::exp(lambda * c * c);
        const double s2a = std::sin(2.0 * alpha * x1);
        const double c2a = std::cos(2.0 * alpha * x1);
        const double dE = -lambda * alpha * s2a * E;
        const double ddE = E * (lambda * lambda * alpha * alpha * s2a * s2a -
                                2.0 * lambda * alpha * alpha * c2a);
        const double S1 = std::sin(beta * x1);
        const double dS1 = beta * std::cos(beta * x1);
        const double ddS1 = -beta * beta * S1;
        return Axis1{E * S1, dE * S1 + E * dS1, ddE * S1 + 2.0 * dE * dS1 + E * ddS1};
    };

    p.exact = [=](const Eigen::VectorXd& x) { return axis1(x[0]).A * std::sin(gamma * x[1]); };
    p.exact_jet = [=](const Eigen::VectorXd& x) {
        const Axis1 a = axis1(x[0]);
        const double S2 = std::sin(gamma * x[1]);
        const double dS2 = gamma * std::cos(gamma * x[1]);
        Jet j(2);
        j.value = a.A * S2;
        j.grad[0] = a.dA * S2;
        j.grad[1] = a.A * dS2;
        j.lap_diag[0] = a.ddA * S2;
        j.lap_diag[1] = -gamma * gamma * a.A * S2;
        return j;
    };
    const double k2 = p.wavenumber * p.wavenumber;
    p.source = [=](const Eigen::VectorXd& x) {
        const Axis1 a = axis1(x[0]);
        const double S2 = std::sin(gamma * x[1]);
        return (a.ddA + (k2 - gamma * gamma) * a.A) * S2;
    };
    return p;
}

PdeProblem problem_by_name(const std::string& name) {
    if (name == "poisson1d") return problem_1d_poisson();
    if (name == "poisson2d") return problem_2d_poisson();
    if (name == "helmholtz2d") return problem_2d_helmholtz();
    throw ConfigError("unknown problem: '" + name + "' (known: poisson1d, poisson2d, helmholtz2d)");
}

std::vector<std::string> problem_names() { return {"poisson1d", "poisson2d", "helmholtz2d"}; }

} // namespace fd3m
