#pragma once

#include <complex>

#include <Eigen/Dense>

namespace randblock {

using cplx = std::complex<double>;

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
  [[nodiscard]] double length() const { return hi - lo; }
};

/// A Monte-Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

}  // namespace randblock
