#include "kg/linalg.hpp"

#include "kg/error.hpp"

#include <algorithm>
#include <cmath>

namespace kg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ContractionNotLessThanOne: return "ContractionNotLessThanOne";
    case ErrorCode::KappaOutOfRange: return "KappaOutOfRange";
    case ErrorCode::KappaMinusNotAboveMinusOne: return "KappaMinusNotAboveMinusOne";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::ZeroInSpectrum: return "ZeroInSpectrum";
    case ErrorCode::NonRealSpectrum: return "NonRealSpectrum";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::SolverFailure: return "SolverFailure";
  }
  return "UnknownError";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return ErrorCategory::Parse;
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::NotSymmetric:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ValidationError:
      return ErrorCategory::Validation;
    case ErrorCode::InvalidArgument:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Solver;
  }
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm_estimate(const Matrix& m, int iterations) {
  if (m.size() == 0) return 0.0;
  Vector x(m.cols());
  for (Index i = 0; i < x.size(); ++i) x(i) = 1.0 + 0.1 * std::sin(1.0 + static_cast<double>(i));
  x.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector y = m.transpose() * (m * x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    sigma = std::sqrt(ny);
    x = y / ny;
  }
  return std::max(sigma, (m * x).norm());
}

Matrix swap_symmetry(Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n).setIdentity();
  return j;
}

Matrix apply_swap(const Matrix& m) {
  const Index n = m.rows() / 2;
  Matrix out(m.rows(), m.cols());
  out.topRows(n) = m.bottomRows(n);
  out.bottomRows(n) = m.topRows(n);
  return out;
}

Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace kg
