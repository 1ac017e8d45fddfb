#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace liecv {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Dense complex operator on flattened grid samples.
using LinOp = CMat;

/// A numerical consistency check failed (non-ideal input, non-Hermitian sum,
/// broken automorphism, ...). Argument errors use std::invalid_argument.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr double kJacobiTol = 1e-12;
inline constexpr double kIdealTol = 1e-10;

}  // namespace liecv
