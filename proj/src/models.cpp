#include "kg/models.hpp"

#include "kg/error.hpp"
#include "kg/format.hpp"

#include <cmath>

namespace kg {

ModelSpec harmonic_model(const HarmonicParams& p) {
  if (p.grid_points < 3) throw Error(ErrorCode::InvalidArgument, "grid_points must be at least 3");
  if (!(p.half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "half_width must be positive");
  if (p.alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "alpha must be nonnegative");
  if (p.beta < 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be nonnegative");

  const Index n = p.grid_points;
  const double h = 2.0 * p.half_width / static_cast<double>(n + 1);
  const double inv_h2 = 1.0 / (h * h);
  Matrix u2 = Matrix::Zero(n, n);
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    x(i) = -p.half_width + static_cast<double>(i + 1) * h;
    u2(i, i) = 2.0 * inv_h2 + x(i) * x(i) + p.beta;
    if (i + 1 < n) {
      u2(i, i + 1) = -inv_h2;
      u2(i + 1, i) = -inv_h2;
    }
  }
  const std::string label = "harmonic(alpha=" + format_real(p.alpha) + ",beta=" + format_real(p.beta) +
                            ",N=" + std::to_string(p.grid_points) + ",L=" + format_real(p.half_width) + ")";
  return ModelSpec(SymmetricMatrix(u2), SymmetricMatrix::diagonal(p.alpha * x), label);
}

HarmonicEigenvalues exact_harmonic_eigs(double alpha, double beta, int n) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 1)");
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "level index must be nonnegative");
  const double s = 1.0 - alpha * alpha;
  const double mu = std::sqrt(s * beta + std::pow(s, 1.5) * (1.0 + 2.0 * n));
  return {mu, -mu};
}

double harmonic_sensitivity(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 1)");
  return -1.5 * alpha / (1.0 - alpha * alpha);
}

ModelSpec square_well_model(const SquareWellParams& p) {
  if (!(p.tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be nonnegative");
  Matrix u2(2, 2);
  u2 << 2.0, -1.0, -1.0, 2.0;
  Matrix v = Matrix::Zero(2, 2);
  v(0, 0) = -p.tau;
  return ModelSpec(SymmetricMatrix(u2), SymmetricMatrix(v), "square_well(tau=" + format_real(p.tau) + ")");
}

SymmetricMatrix square_well_perturbation(double eta, WellPerturbation sign) {
  Matrix dv = Matrix::Zero(2, 2);
  dv(0, 0) = sign == WellPerturbation::Coupling ? -eta : eta;
  return SymmetricMatrix(dv);
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SymmetricMatrix random_perturbation(Index order, double scale, std::uint64_t seed) {
  if (order <= 0) throw Error(ErrorCode::InvalidArgument, "order must be positive");
  if (!(scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be nonnegative");
  SplitMix64 rng(seed);
  Matrix dv(order, order);
  for (Index i = 0; i < order; ++i) {
    for (Index j = i; j < order; ++j) {
      dv(i, j) = rng.uniform(-scale, scale);
      dv(j, i) = dv(i, j);
    }
  }
  return SymmetricMatrix(dv);
}

}  // namespace kg
