#pragma once

#include <Eigen/Dense>

namespace fd3m {

/// Value, spatial gradient and the diagonal of the spatial Hessian of a
/// scalar field at one point. Mixed partials are never tracked; the PDE
/// residuals only need the Laplacian, which is lap_diag.sum().
struct Jet {
    double value = 0.0;
    Eigen::VectorXd grad;     // d entries: du/dx_j
    Eigen::VectorXd lap_diag; // d entries: d2u/dx_j^2

    Jet() = default;
    explicit Jet(int dim)
        : value(0.0), grad(Eigen::VectorXd::Zero(dim)), lap_diag(Eigen::VectorXd::Zero(dim)) {}
    Jet(double v, Eigen::VectorXd g, Eigen::VectorXd l)
        : value(v), grad(std::move(g)), lap_diag(std::move(l)) {}

    int dim() const { return static_cast<int>(grad.size()); }
    double laplacian() const { return lap_diag.sum(); }

    static Jet constant(double v, int dim) {
        Jet j(dim);
        j.value = v;
        return j;
    }

    Jet& operator+=(const Jet& o) {
        value += o.value;
        grad += o.grad;
        lap_diag += o.lap_diag;
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        value -= o.value;
        grad -= o.grad;
        lap_diag -= o.lap_diag;
        return *this;
    }
    Jet& operator*=(double s) {
        value *= s;
        grad *= s;
        lap_diag *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }

    /// Per-axis product rule; exact for the diagonal second derivatives.
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.dim());
        r.value = a.value * b.value;
        r.grad = a.grad * b.value + b.grad * a.value;
        r.lap_diag = a.lap_diag * b.value + 2.0 * a.grad.cwiseProduct(b.grad) + b.lap_diag * a.value;
        return r;
    }
};

} // namespace fd3m
