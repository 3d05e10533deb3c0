#include "kg/operator_core.hpp"

#include "kg/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kg {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kDefinitenessTolerance = 1e-12;

std::string dims(Index r, Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square, got " +
                                                  dims(entries.rows(), entries.cols()));
  }
  if (entries.size() > 0) {
    if (!entries.allFinite()) throw Error(ErrorCode::ValidationError, "matrix has non-finite entries");
    const double scale = 1.0 + entries.cwiseAbs().maxCoeff();
    const double skew = asymmetry(entries);
    if (skew > kSymmetryTolerance * scale) {
      std::ostringstream os;
      os << "matrix is not symmetric (max |m_ij - m_ji| = " << skew << ")";
      throw Error(ErrorCode::NotSymmetric, os.str());
    }
  }
  entries_ = symmetric_part(entries);
}

SymmetricMatrix SymmetricMatrix::identity(Index n) { return SymmetricMatrix(Matrix::Identity(n, n)); }

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  return SymmetricMatrix(Matrix(d.asDiagonal()));
}

SymmetricMatrix SymmetricMatrix::zero(Index n) { return SymmetricMatrix(Matrix::Zero(n, n)); }

ModelSpec::ModelSpec(SymmetricMatrix u_squared, SymmetricMatrix v, std::string label)
    : u_squared_(std::move(u_squared)), v_(std::move(v)), label_(std::move(label)) {
  if (u_squared_.order() == 0) throw Error(ErrorCode::DimensionMismatch, "empty model");
  if (u_squared_.order() != v_.order()) {
    throw Error(ErrorCode::DimensionMismatch,
                "u_squared is " + dims(u_squared_.order(), u_squared_.order()) + " but v is " +
                    dims(v_.order(), v_.order()));
  }
  Eigen::LLT<Matrix> llt(u_squared_.matrix());
  const double scale = u_squared_.matrix().diagonal().cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success ||
      Matrix(llt.matrixL()).diagonal().array().square().minCoeff() <= kDefinitenessTolerance * scale) {
    throw Error(ErrorCode::NotPositiveDefinite, "u_squared is not positive definite");
  }
}

ModelSpec ModelSpec::with_potential(SymmetricMatrix v, std::string label) const {
  return ModelSpec(u_squared_, std::move(v), label.empty() ? label_ : std::move(label));
}

SpdSpectrum::SpdSpectrum(const SymmetricMatrix& m) {
  if (m.order() == 0) throw Error(ErrorCode::DimensionMismatch, "empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "symmetric eigensolver failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  const double scale = eigenvalues_.cwiseAbs().maxCoeff();
  if (!(eigenvalues_(0) > kDefinitenessTolerance * scale)) {
    std::ostringstream os;
    os << "smallest eigenvalue " << eigenvalues_(0) << " is not positive";
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
}

Matrix SpdSpectrum::power(double exponent) const {
  const Vector d = eigenvalues_.array().pow(exponent).matrix();
  return eigenvectors_ * d.asDiagonal() * eigenvectors_.transpose();
}

SymmetricMatrix sqrt_spd(const SymmetricMatrix& m) { return SymmetricMatrix(symmetric_part(SpdSpectrum(m).power(0.5))); }

UnitRoots unit_roots(const SymmetricMatrix& u_squared) {
  const SpdSpectrum spectrum(u_squared);
  UnitRoots roots;
  roots.u = symmetric_part(spectrum.power(0.5));
  roots.u_inv = symmetric_part(spectrum.power(-0.5));
  roots.u_half = symmetric_part(spectrum.power(0.25));
  roots.u_inv_half = symmetric_part(spectrum.power(-0.25));
  roots.u_min = std::sqrt(spectrum.min_eigenvalue());
  roots.u_inv_norm = 1.0 / roots.u_min;
  return roots;
}

Matrix KleinGordonSystem::shifted_gram() const {
  Matrix g = gram;
  g.topRightCorner(n, n).diagonal().array() -= shift;
  g.bottomLeftCorner(n, n).diagonal().array() -= shift;
  return g;
}

Matrix KleinGordonSystem::block_a() const {
  Matrix a = Matrix::Identity(2 * n, 2 * n);
  a.topRightCorner(n, n) = a_matrix.transpose();
  a.bottomLeftCorner(n, n) = a_matrix;
  return a;
}

Matrix KleinGordonSystem::u_block() const {
  Matrix b = Matrix::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = u_sqrt;
  b.bottomRightCorner(n, n) = u_sqrt;
  return b;
}

KleinGordonSystem assemble_system(const ModelSpec& spec, double shift) {
  return assemble_system(spec, shift, unit_roots(spec.u_squared()));
}

KleinGordonSystem assemble_system(const ModelSpec& spec, double shift, const UnitRoots& roots) {
  const Index n = spec.order();
  if (roots.u.rows() != n) throw Error(ErrorCode::DimensionMismatch, "roots do not match the model order");
  const Matrix& v = spec.v().matrix();

  KleinGordonSystem sys;
  sys.n = n;
  sys.spec = spec;
  sys.u_sqrt = roots.u;
  sys.u_inv_sqrt = roots.u_inv;
  sys.u_quarter = roots.u_half;
  sys.u_inv_quarter = roots.u_inv_half;
  sys.shift = shift;
  sys.u_min_eigenvalue = roots.u_min;

  const Matrix upper = roots.u_half * v * roots.u_inv_half;  // U^{1/2} V U^{-1/2}
  const Matrix lower = upper.transpose();                   // U^{-1/2} V U^{1/2}

  sys.hamiltonian.resize(2 * n, 2 * n);
  sys.hamiltonian.topLeftCorner(n, n) = upper;
  sys.hamiltonian.topRightCorner(n, n) = roots.u;
  sys.hamiltonian.bottomLeftCorner(n, n) = roots.u;
  sys.hamiltonian.bottomRightCorner(n, n) = lower;

  sys.gram = symmetric_part(apply_swap(sys.hamiltonian));

  sys.free_hamiltonian = Matrix::Zero(2 * n, 2 * n);
  sys.free_hamiltonian.topRightCorner(n, n) = roots.u;
  sys.free_hamiltonian.bottomLeftCorner(n, n) = roots.u;

  sys.a_matrix = v * roots.u_inv;
  sys.a_matrix -= shift * roots.u_inv;
  sys.contraction = spectral_norm(sys.a_matrix);
  return sys;
}

FreeSystem assemble_free(const ModelSpec& spec) {
  const Index n = spec.order();
  const Matrix u = sqrt_spd(spec.u_squared()).matrix();
  FreeSystem fs;
  fs.free_hamiltonian = Matrix::Zero(2 * n, 2 * n);
  fs.free_hamiltonian.topRightCorner(n, n) = u;
  fs.free_hamiltonian.bottomLeftCorner(n, n) = u;
  fs.u_block = Matrix::Zero(2 * n, 2 * n);
  fs.u_block.topLeftCorner(n, n) = u;
  fs.u_block.bottomRightCorner(n, n) = u;
  return fs;
}

Matrix operator_a(const ModelSpec& spec, double shift) {
  const Index n = spec.order();
  const Matrix u_inv = SpdSpectrum(spec.u_squared()).power(-0.5);
  return (spec.v().matrix() - shift * Matrix::Identity(n, n)) * u_inv;
}

double contraction_bound(const ModelSpec& spec, double shift) { return spectral_norm(operator_a(spec, shift)); }

ShiftOptimum optimize_shift(const ModelSpec& spec) {
  const SpdSpectrum u2(spec.u_squared());
  const Matrix u_inv = u2.power(-0.5);
  const Matrix vu_inv = spec.v().matrix() * u_inv;
  auto objective = [&](double mu) { return spectral_norm(vu_inv - mu * u_inv); };

  Eigen::SelfAdjointEigenSolver<Matrix> ev(spec.v().matrix(), Eigen::EigenvaluesOnly);
  const double u_norm = std::sqrt(u2.max_eigenvalue());
  double lo = ev.eigenvalues().minCoeff() - u_norm;
  double hi = ev.eigenvalues().maxCoeff() + u_norm;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-10) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  ShiftOptimum best{0.5 * (lo + hi), 0.0};
  best.contraction = objective(best.shift);
  return best;
}

}  // namespace kg
