#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fd3m/geometry.hpp"
#include "fd3m/jet.hpp"

namespace fd3m {

enum class PdeOperator { poisson, helmholtz };

/// Boundary-value benchmark with a closed-form manufactured solution. The
/// source f is hard-coded from symbolic differentiation of u (cross-checked
/// by finite differences in the tests), and g is the restriction of u to the
/// domain boundary.
struct PdeProblem {
    std::string name;
    BoxDomain domain;
    PdeOperator op = PdeOperator::poisson;
    double wavenumber = 0.0; // Helmholtz only

    std::function<double(const Eigen::VectorXd&)> exact;
    std::function<Jet(const Eigen::VectorXd&)> exact_jet; // analytic derivatives
    std::function<double(const Eigen::VectorXd&)> source;

    int dim() const { return domain.dim(); }
    /// Coefficient of the zeroth-order term: k^2 for Helmholtz, 0 otherwise.
    double reaction_coeff() const {
        return op == PdeOperator::helmholtz ? wavenumber * wavenumber : 0.0;
    }
    double boundary_value(const Eigen::VectorXd& x) const { return exact(x); }
};

/// L(u)(x) - f(x) for a candidate jet at x.
double residual(const PdeProblem& problem, const Jet& jet, const Eigen::VectorXd& x);

/// u(x) = sin(5 pi x) + sin(30 pi x) on [-1, 1].
PdeProblem problem_1d_poisson();
/// u = sin(5 pi x1)cos(3 pi x2) + sin(10 pi x1)cos(2 pi x2) + sin(20 pi x1)cos(pi x2) on [-1,1]^2.
PdeProblem problem_2d_poisson();
/// u = exp(0.75 cos^2(2 pi x1)) sin(16 pi x1) sin(pi x2), k = 16 pi, on [-1,1]^2.
PdeProblem problem_2d_helmholtz();

/// CLI-facing registry: poisson1d, poisson2d, helmholtz2d.
PdeProblem problem_by_name(const std::string& name);
std::vector<std::string> problem_names();

} // namespace fd3m
