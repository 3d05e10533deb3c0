#pragma once

// Dense linear algebra helpers shared by every module.

#include <Eigen/Dense>

#include <complex>
#include <limits>

namespace kg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Open interval (lower, upper). Empty when lower >= upper.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool empty() const { return !(lower < upper); }
  bool contains(double x) const { return lower < x && x < upper; }
  double width() const { return empty() ? 0.0 : upper - lower; }
};

/// Largest singular value, via the symmetric eigenproblem of the smaller Gram product.
double spectral_norm(const Matrix& m);

/// Power-iteration estimate of the spectral norm. Cheap; used only for tolerance scales.
double spectral_norm_estimate(const Matrix& m, int iterations = 60);

/// The block swap [[0, I], [I, 0]] of order 2n.
Matrix swap_symmetry(Index n);

/// Applies the block swap to the rows of m without forming the swap matrix.
Matrix apply_swap(const Matrix& m);

Matrix symmetric_part(const Matrix& m);

/// max |m(i,j) - m(j,i)|
double asymmetry(const Matrix& m);

}  // namespace kg
