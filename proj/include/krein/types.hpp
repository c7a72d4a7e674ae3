#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace krein {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

// Extended precision used by the pencil oracle.
using WideComplex = std::complex<long double>;
using WideMatrix = Eigen::Matrix<WideComplex, Eigen::Dynamic, Eigen::Dynamic>;

/// Numerical tolerances shared by every module. Defaults are the values the
/// higher-level routines were calibrated against.
struct Tolerances {
  double sep_min = 1e-9;          // atom separation / pole proximity
  double root_tol = 1e-8;         // zero clustering and multiplicity test
  double rank_tol = 1e-10;        // relative SVD threshold
  double degenerate_tol = 1e-13;  // |q(z)+c| below this is spectrum
  double coeff_trim = 1e-12;      // relative size of negligible leading coefficients
};

enum class ErrorKind {
  PoleAt,
  IdenticallyZero,
  EmptyMeasure,
  InvalidMeasure,
  DimensionMismatch,
  TooFewProbes,
  QZero,
  NotAnExtension,
  NotAnEigenvalue,
  NotRankOne,
  Infeasible,
  MixedHalfPlanes,
  ZeroOfG,
  PhaseMinusOne,
  NonHerglotzResidue,
  InvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoleAt: return "PoleAt";
    case ErrorKind::IdenticallyZero: return "IdenticallyZero";
    case ErrorKind::EmptyMeasure: return "EmptyMeasure";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewProbes: return "TooFewProbes";
    case ErrorKind::QZero: return "QZero";
    case ErrorKind::NotAnExtension: return "NotAnExtension";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::NotRankOne: return "NotRankOne";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MixedHalfPlanes: return "MixedHalfPlanes";
    case ErrorKind::ZeroOfG: return "ZeroOfG";
    case ErrorKind::PhaseMinusOne: return "PhaseMinusOne";
    case ErrorKind::NonHerglotzResidue: return "NonHerglotzResidue";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown when a point hits a real atom; carries the atom coordinate.
class PoleError : public Error {
 public:
  explicit PoleError(double atom)
      : Error(ErrorKind::PoleAt, "point coincides with atom t=" + std::to_string(atom)),
        atom_(atom) {}

  double atom() const noexcept { return atom_; }

 private:
  double atom_;
};

}  // namespace krein
