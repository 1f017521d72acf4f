#pragma once

#include <Eigen/Dense>

namespace sflat {

/// Classical fourth-order Runge-Kutta step for x' = f(t, x).
template <typename F>
Eigen::VectorXd rk4_step(F&& f, double t, const Eigen::VectorXd& x, double h) {
    const Eigen::VectorXd k1 = f(t, x);
    const Eigen::VectorXd k2 = f(t + h / 2, x + h / 2 * k1);
    const Eigen::VectorXd k3 = f(t + h / 2, x + h / 2 * k2);
    const Eigen::VectorXd k4 = f(t + h, x + h * k3);
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace sflat
