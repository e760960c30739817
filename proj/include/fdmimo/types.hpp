#pragma once

#include <complex>
#include <cmath>

#include <Eigen/Dense>

namespace fdmimo {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Point2 = Eigen::Vector2d;

// Single source of truth for dB/linear conversions. Power quantities only
// (10 dB per decade).
template <typename Scalar>
inline Scalar db_to_linear(Scalar db) {
  return std::pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
inline Scalar linear_to_db(Scalar x) {
  return Scalar(10) * std::log10(x);
}

template <typename Scalar>
inline Scalar dbm_to_watts(Scalar dbm) {
  return db_to_linear(dbm - Scalar(30));
}

template <typename Scalar>
inline Scalar watts_to_dbm(Scalar w) {
  return linear_to_db(w) + Scalar(30);
}

}  // namespace fdmimo
