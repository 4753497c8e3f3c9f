#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Core>

namespace qgraph {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using MatrixXc = Eigen::MatrixXcd;
using MatrixXr = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * pi);
    return a <= -pi ? a + 2.0 * pi : a;
}

}  // namespace qgraph
