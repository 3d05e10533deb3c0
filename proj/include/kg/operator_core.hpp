#pragma once

// Assembly of the block Klein-Gordon operators
//
//     H = [[U^{1/2} V U^{-1/2}, U], [U, U^{-1/2} V U^{1/2}]],   G = J H,
//
// from the pair (U^2, V), together with the contraction b = ||(V - mu) U^{-1}||
// which decides whether H is similar to a selfadjoint matrix (b < 1).

#include "kg/linalg.hpp"

#include <string>

namespace kg {

/// Dense real symmetric matrix. Construction checks symmetry to
/// 1e-12 * (1 + max|entry|) and then stores the exact symmetric part.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& entries);

  static SymmetricMatrix identity(Index n);
  static SymmetricMatrix diagonal(const Vector& d);
  static SymmetricMatrix zero(Index n);

  Index order() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
};

/// The model data (U^2, V). U^2 is positive definite, both have the same order.
class ModelSpec {
 public:
  ModelSpec() = default;
  ModelSpec(SymmetricMatrix u_squared, SymmetricMatrix v, std::string label = {});

  const SymmetricMatrix& u_squared() const { return u_squared_; }
  const SymmetricMatrix& v() const { return v_; }
  const std::string& label() const { return label_; }
  Index order() const { return u_squared_.order(); }

  /// Same U^2, potential replaced.
  ModelSpec with_potential(SymmetricMatrix v, std::string label = {}) const;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.u_squared_ == b.u_squared_ && a.v_ == b.v_ && a.label_ == b.label_;
  }

 private:
  SymmetricMatrix u_squared_;
  SymmetricMatrix v_;
  std::string label_;
};

/// Eigendecomposition of a symmetric positive definite matrix, used to form
/// arbitrary real powers. Throws NotPositiveDefinite when the smallest
/// eigenvalue is <= 1e-12 * (largest |eigenvalue|).
class SpdSpectrum {
 public:
  explicit SpdSpectrum(const SymmetricMatrix& m);

  Matrix power(double exponent) const;
  double min_eigenvalue() const { return eigenvalues_(0); }
  double max_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }
  const Vector& eigenvalues() const { return eigenvalues_; }

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

SymmetricMatrix sqrt_spd(const SymmetricMatrix& m);

/// Powers of U = (U^2)^{1/2} needed for assembly, all from one eigendecomposition.
struct UnitRoots {
  Matrix u;               // U
  Matrix u_inv;           // U^{-1}
  Matrix u_half;          // U^{1/2}
  Matrix u_inv_half;      // U^{-1/2}
  double u_min = 0.0;     // smallest eigenvalue of U, = inf |sigma(H0)|
  double u_inv_norm = 0.0;
};

UnitRoots unit_roots(const SymmetricMatrix& u_squared);

struct KleinGordonSystem {
  Index n = 0;
  ModelSpec spec;
  Matrix u_sqrt;          // U
  Matrix u_inv_sqrt;      // U^{-1}
  Matrix u_quarter;       // U^{1/2}
  Matrix u_inv_quarter;   // U^{-1/2}
  Matrix hamiltonian;     // H
  Matrix gram;            // G = J H, symmetrized
  Matrix free_hamiltonian;
  double shift = 0.0;     // mu
  Matrix a_matrix;        // (V - mu) U^{-1}
  double contraction = 0.0;
  double u_min_eigenvalue = 0.0;

  /// G - mu J
  Matrix shifted_gram() const;
  /// [[I, A^T], [A, I]]
  Matrix block_a() const;
  /// diag(U, U)
  Matrix u_block() const;
};

KleinGordonSystem assemble_system(const ModelSpec& spec, double shift);
KleinGordonSystem assemble_system(const ModelSpec& spec, double shift, const UnitRoots& roots);

struct FreeSystem {
  Matrix free_hamiltonian;  // [[0, U], [U, 0]]
  Matrix u_block;           // diag(U, U) = J H0 = |H0|
};

FreeSystem assemble_free(const ModelSpec& spec);

Matrix operator_a(const ModelSpec& spec, double shift);
double contraction_bound(const ModelSpec& spec, double shift);

struct ShiftOptimum {
  double shift = 0.0;
  double contraction = 0.0;
};

/// Minimizes mu -> ||(V - mu) U^{-1}|| (a convex function) by golden-section
/// search on [min eig V - ||U||, max eig V + ||U||] to 1e-10 in mu.
ShiftOptimum optimize_shift(const ModelSpec& spec);

}  // namespace kg
