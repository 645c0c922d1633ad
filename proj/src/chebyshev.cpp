#include "fd3m/chebyshev.hpp"

#include <cmath>
#include <stdexcept>

namespace fd3m {

ChebyshevSeries ChebyshevSeries::fit(const std::function<double(double)>& f, double a, double b,
                                     int n) {
    if (n < 2) throw std::invalid_argument("ChebyshevSeries: need at least 2 intervals");
    if (!(a < b)) throw std::invalid_argument("ChebyshevSeries: empty interval");
    ChebyshevSeries s;
    s.a_ = a;
    s.b_ = b;

    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Eigen::VectorXd fv(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double xt = std::cos(M_PI * k / n); // Lobatto node on [-1, 1]
        fv[k] = f(mid + half * xt);
    }

    // DCT-I with halved endpoint terms; then halve c_0 and c_n once more so
    // the plain sum  p(x) = sum_j c_j T_j(x)  interpolates the nodes.
    Eigen::VectorXd c(n + 1);
    for (int j = 0; j <= n; ++j) {
        double acc = 0.5 * (fv[0] + (j % 2 == 0 ? fv[n] : -fv[n]));
        for (int k = 1; k < n; ++k) acc += fv[k] * std::cos(M_PI * j * k / n);
        c[j] = 2.0 * acc / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    s.coeff_ = c;

    const double scale = 2.0 / (b - a); // d xt / d t
    s.dcoeff_ = derivative_coefficients(s.coeff_, scale);
    s.ddcoeff_ = derivative_coefficients(s.dcoeff_, scale);
    return s;
}

Eigen::VectorXd ChebyshevSeries::derivative_coefficients(const Eigen::VectorXd& a, double scale) {
    const int n = static_cast<int>(a.size()) - 1;
    if (n <= 0) return Eigen::VectorXd::Zero(1);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int j = n - 1; j >= 0; --j)
        r[j] = 2.0 * (j + 1) * a[j + 1] + (j + 2 <= n - 1 ? r[j + 2] : 0.0);
    r[0] *= 0.5;
    return scale * r;
}

double ChebyshevSeries::clenshaw(const Eigen::VectorXd& a, double xt) {
    const int n = static_cast<int>(a.size()) - 1;
    double b1 = 0.0, b2 = 0.0;
    for (int j = n; j >= 1; --j) {
        const double t = 2.0 * xt * b1 - b2 + a[j];
        b2 = b1;
        b1 = t;
    }
    return xt * b1 - b2 + a[0];
}

double ChebyshevSeries::value(double t) const {
    const double xt = (2.0 * t - (a_ + b_)) / (b_ - a_);
    return clenshaw(coeff_, xt);
}

void ChebyshevSeries::eval(double t, double& v, double& d1, double& d2) const {
    const double xt = (2.0 * t - (a_ + b_)) / (b_ - a_);
    v = clenshaw(coeff_, xt);
    d1 = clenshaw(dcoeff_, xt);
    d2 = clenshaw(ddcoeff_, xt);
}

} // namespace fd3m
