#pragma once

#include "kg/operator_core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace kg {

enum class SignType { Positive, Negative, Neutral };
enum class SolverPath { Similarity, Direct };

const char* to_string(SignType t);
const char* to_string(SolverPath p);

/// Below this distance to 1 the contraction is considered too close to the
/// boundary for the similarity route, and the direct solver is used.
inline constexpr double kSimilarityMargin = 0.02;
/// |(Jx, x)| / |x|^2 below this marks a J-neutral eigenvector.
inline constexpr double kNeutralThreshold = 1e-6;
/// Eigenvalues closer than this (relative to ||H||) form one cluster.
inline constexpr double kClusterTolerance = 1e-8;
/// Imaginary parts above this (relative to ||H||) make the spectrum non-real.
inline constexpr double kImaginaryTolerance = 1e-8;
/// Pairs from the direct solver closer than this (relative to ||H||) are the
/// split image of a Jordan block and are merged to their mean.
inline constexpr double kJordanSplitTolerance = 1e-6;

struct SpectrumOptions {
  bool compute_vectors = true;
  bool check_defects = true;
};

struct SpectrumReport {
  ComplexVector eigenvalues;           // sorted by real part, then imaginary part
  ComplexMatrix eigenvectors;          // unit columns; empty without vectors
  std::vector<SignType> sign_types;
  std::vector<double> positive_ordered;  // positive type, increasing
  std::vector<double> negative_ordered;  // negative type, decreasing
  Interval central_gap;
  bool defective = false;
  bool is_real_spectrum = true;
  std::optional<double> residual_max;  // max |Hx - lambda x| / (|H| |x|)
  SolverPath path = SolverPath::Similarity;
  double shift = 0.0;
  double matrix_scale = 0.0;           // estimate of ||H||

  bool has_vectors() const { return eigenvectors.cols() > 0; }
  std::vector<double> real_parts() const;
  double max_imaginary() const;
};

struct SignOperator {
  Matrix j1;
  double norm_j1 = 1.0;
};

struct DefectReport {
  bool defective = false;
  std::optional<double> eigenvalue;
  ComplexVector witness;
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
  bool neutral_vector = false;
};

/// Spectrum of H = J G. Uses the similarity of H - mu to the symmetric
/// L^T J L (G - mu J = L L^T) when the contraction is at least
/// kSimilarityMargin below 1, and a general real eigensolver otherwise.
SpectrumReport eigen_spectrum(const KleinGordonSystem& system, const SpectrumOptions& opts = {});

/// Same as eigen_spectrum, for an arbitrary symmetric G of even order. The
/// similarity route is attempted whenever G - mu J admits a Cholesky factor.
SpectrumReport gram_spectrum(const Matrix& gram, double shift, const SpectrumOptions& opts = {});

/// General dense eigensolve of H, no structure assumed.
SpectrumReport direct_spectrum(const Matrix& hamiltonian, double shift, const SpectrumOptions& opts = {});

/// Eigenvalues of a general real matrix sorted by (real, imaginary). Used as an oracle.
ComplexVector direct_eigenvalues(const Matrix& m);

/// J1 = sign(H - mu). Requires contraction < 1.
SignOperator sign_operator(const KleinGordonSystem& system);

/// (largest eigenvalue below shift, smallest eigenvalue above shift).
Interval central_gap(const SpectrumReport& report, double shift);

/// inf over s of |(s - lambda) / s|
double relative_distance(double lambda, std::span<const double> spectrum);

/// Orders up to which pencil residuals come from a full eigen or singular value solve.
inline constexpr Index kPencilDenseOrder = 64;

/// Smallest singular value of (lambda I - V)^2 - U^2. For real lambda beyond
/// kPencilDenseOrder this is the inverse-iteration value |Q x|, |x| = 1, an
/// upper bound that is tight once the iteration has converged.
double pencil_residual(const ModelSpec& spec, Complex lambda);

/// Scale ||U^2|| + |lambda|^2 + ||V||^2 against which pencil residuals are judged.
double pencil_scale(const ModelSpec& spec, Complex lambda);

DefectReport defect_check(const KleinGordonSystem& system, const SpectrumReport& report);
DefectReport defect_check(const Matrix& hamiltonian, const SpectrumReport& report);

}  // namespace kg
