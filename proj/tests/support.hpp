#pragma once

// Seeded generators for random test systems.

#include "kg/models.hpp"
#include "kg/operator_core.hpp"

#include <cmath>

namespace kg::test {

inline Matrix random_matrix(SplitMix64& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

inline Matrix random_symmetric(SplitMix64& rng, Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transpose());
}

inline Matrix random_orthogonal(SplitMix64& rng, Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

inline Matrix random_spd(SplitMix64& rng, Index n) {
  const Matrix b = random_matrix(rng, n, n);
  Matrix u2 = b * b.transpose();
  u2.diagonal().array() += rng.uniform(0.2, 2.0);
  return 0.5 * (u2 + u2.transpose());
}

/// A random model with contraction exactly `target` at `shift`.
struct RandomCase {
  ModelSpec spec;
  double shift = 0.0;
  double contraction = 0.0;
};

inline RandomCase random_case(std::uint64_t seed, Index max_order = 8, double max_contraction = 0.7) {
  SplitMix64 rng(seed);
  const Index n = 1 + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(max_order));
  const Matrix u2 = random_spd(rng, n);
  const Matrix w = random_symmetric(rng, n);
  const double shift = rng.uniform(-1.0, 1.0);
  const double target = rng.uniform(0.0, max_contraction);
  const UnitRoots roots = unit_roots(SymmetricMatrix(u2));
  const Matrix wu = w * roots.u_inv;
  Eigen::JacobiSVD<Matrix> svd(wu);
  const double scale = svd.singularValues()(0) > 0.0 ? target / svd.singularValues()(0) : 0.0;
  Matrix v = scale * w;
  v.diagonal().array() += shift;
  RandomCase c;
  c.spec = ModelSpec(SymmetricMatrix(u2), SymmetricMatrix(0.5 * (v + v.transpose())));
  c.shift = shift;
  c.contraction = target;
  return c;
}

/// Random dV with ||dV U^{-1}|| = c.
inline SymmetricMatrix random_delta(std::uint64_t seed, const ModelSpec& spec, double c) {
  SplitMix64 rng(seed ^ 0xA5A5A5A5ULL);
  const Matrix w = random_symmetric(rng, spec.order());
  const UnitRoots roots = unit_roots(spec.u_squared());
  Eigen::JacobiSVD<Matrix> svd(w * roots.u_inv);
  const double s = svd.singularValues()(0);
  return SymmetricMatrix(s > 0.0 ? Matrix(w * (c / s)) : w);
}

/// (Jx, x) / |x|^2
inline double j_ratio(const ComplexVector& x) {
  const Index n = x.size() / 2;
  const Complex jxx = x.head(n).dot(x.tail(n)) + x.tail(n).dot(x.head(n));
  return jxx.real() / x.squaredNorm();
}

}  // namespace kg::test
