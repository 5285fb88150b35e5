#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hehom {

using cplx = std::complex<double>;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

// Integer coordinates with respect to a lattice basis. Only the first d entries are used.
using MultiIndex = std::array<int, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The chosen truncation or sampling grid cannot represent the data faithfully.
class ResolutionFailure : public Error {
 public:
  using Error::Error;
};

// Spectral gap or separation radius could not be established.
class CertificationError : public Error {
 public:
  using Error::Error;
};

// Eigensolver or linear solve failed its residual check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Two computations that must agree do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace hehom
