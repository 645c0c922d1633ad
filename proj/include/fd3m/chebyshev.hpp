#pragma once

#include <Eigen/Dense>
#include <functional>

namespace fd3m {

/// Chebyshev interpolant of a smooth scalar function on [a, b], with the
/// first and second derivative series precomputed by coefficient recurrence.
/// Evaluation is Clenshaw, O(n) per query. For analytic inputs the error
/// decays geometrically in the node count, so the interpolant (and its two
/// derivatives) can be driven to near machine precision.
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;

    /// Interpolate f at n+1 Chebyshev-Lobatto nodes on [a, b].
    static ChebyshevSeries fit(const std::function<double(double)>& f, double a, double b, int n);

    double value(double t) const;
    /// Value plus first and second derivatives with respect to t.
    void eval(double t, double& v, double& d1, double& d2) const;

    double lo() const { return a_; }
    double hi() const { return b_; }
    int degree() const { return static_cast<int>(coeff_.size()) - 1; }

private:
    double a_ = -1.0, b_ = 1.0;
    Eigen::VectorXd coeff_;   // plain T_j coefficients of f
    Eigen::VectorXd dcoeff_;  // of f'
    Eigen::VectorXd ddcoeff_; // of f''

    static Eigen::VectorXd derivative_coefficients(const Eigen::VectorXd& a, double scale);
    static double clenshaw(const Eigen::VectorXd& a, double xt);
};

} // namespace fd3m
