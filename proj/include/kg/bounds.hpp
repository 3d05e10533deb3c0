#pragma once

// Relative perturbation constants for V -> V + dV and the spectral
// inclusions they certify. Every constant kappa bounds |dg(psi,psi)| / g(psi,psi)
// for g the form of G - mu J; the eigenvalue statements are then relative to mu.

#include "kg/spectral.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kg {

enum class SignCondition { NegativeSemidefinite, PositiveSemidefinite };

const char* to_string(SignCondition s);

struct PerturbationSpec {
  SymmetricMatrix delta_v;
  Matrix delta_a;                 // dV U^{-1}
  double c = 0.0;                 // ||dV U^{-1}||
  double norm_delta_v = 0.0;      // ||dV||
  std::optional<double> nu;       // ||dV (V - mu)^{-1}|| when V - mu is invertible
  bool disjoint = false;          // dA^T A + A^T dA == 0
  std::optional<SignCondition> sign_condition;
};

/// Characterizes dV against an assembled system (its U and shifted A).
PerturbationSpec analyze_perturbation(const KleinGordonSystem& system, const SymmetricMatrix& delta_v);

struct KappaEntry {
  double value = 0.0;
  bool valid = false;
};

struct KappaPair {
  double minus = 0.0;
  double plus = 0.0;
  bool valid = false;
  double max_abs() const;
};

struct KappaBundle {
  double b = 0.0;
  double c = 0.0;
  KappaEntry general;                      // c / (1 - b)
  KappaEntry sum;                          // c + b
  KappaEntry norm_product;                 // ||dV|| ||U^{-1}|| / (1 - b)
  std::optional<KappaEntry> relative;      // nu b / (1 - b)
  std::optional<KappaEntry> disjoint;      // c / sqrt(1 - b^2)
  std::optional<KappaPair> signed_pair;    // (-c / sqrt(1 - b^2), c / (1 - b)) or mirrored
  KappaPair structured;                    // from the block Cholesky analysis
  KappaPair exact;                         // extreme eigenvalues of the pencil (dG, G - mu J)
  double kappa0_hat = 0.0;
  double kappa_prime_hat = 0.0;
  bool rescaled_valid = false;
  std::string rescaled_source;
};

/// alpha = (1 - b) * min eig U; no eigenvalue of H lies in (mu - alpha, mu + alpha).
double gap_bound(const KleinGordonSystem& system);

KappaBundle perturbation_constants(const KleinGordonSystem& system, const PerturbationSpec& pert);

/// Extreme eigenvalues (kappa-, kappa+) of delta_g x = k g x, g positive definite.
std::pair<double, double> exact_kappa_pm(const SymmetricMatrix& g, const SymmetricMatrix& delta_g);

struct Rescaling {
  double kappa0_hat = 0.0;
  double kappa_prime_hat = 0.0;
};

Rescaling rescale_kappa(double kappa_minus, double kappa_plus);

enum class GapCase { PositiveGap, Straddling, NegativeGap };

const char* to_string(GapCase c);

struct GapInclusion {
  Interval original;
  Interval predicted;
  GapCase case_tag = GapCase::Straddling;
};

/// Gap (lower, upper) of H, relative to mu, mapped to a gap of H'.
GapInclusion gap_inclusion(const Interval& gap, double kappa);

/// The same inclusion applied to the stretched operator (1 + k0) H with the
/// rescaled constant k'. In the straddling case this is ((1 + k-) lower, (1 + k-) upper).
Interval improved_inclusion(const Interval& gap, double kappa_minus, double kappa_plus);

/// (lower + a ||J1||, upper - a ||J1||) for a bounded perturbation of norm a.
Interval norm_bound_interval(const Interval& gap, double a, double norm_j1);

struct BlockStructure {
  double a_minus = 0.0;  // extreme eigenvalues of the (1,1) block of L^* dA L
  double a_plus = 0.0;
  double norm_b = 0.0;   // ||dA (I - A^T A)^{-1/2}||
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
};

/// Largest eigenvalue of [[a I, B^T], [B, 0]] for ||B|| = norm_b.
double t_bound(double a, double norm_b);

BlockStructure block_structure_analysis(const Matrix& a_matrix, const Matrix& delta_a);

struct EigenInterval {
  double eigenvalue = 0.0;
  SignType sign_type = SignType::Positive;
  double lower = 0.0;  // closed interval
  double upper = 0.0;
};

/// [lambda - kappa |lambda - mu|, lambda + kappa |lambda - mu|] for each real eigenvalue.
std::vector<EigenInterval> eigenvalue_interval_bounds(const SpectrumReport& report, double kappa);

/// Pairs eigenvalues of H and H': positive types increasing, negative types
/// decreasing; falls back to sorted real parts when the type counts differ.
std::vector<std::pair<double, double>> pair_eigenvalues(const SpectrumReport& base, const SpectrumReport& perturbed);

struct VerificationRow {
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double relative_deviation = 0.0;  // |lambda' - lambda| / |lambda - mu|
};

struct BoundCheck {
  std::string name;
  double value = 0.0;
  bool applicable = false;
  bool pass = false;
};

struct VerificationReport {
  double shift = 0.0;
  double contraction = 0.0;
  double contraction_perturbed = 0.0;
  std::vector<VerificationRow> rows;
  double max_deviation = 0.0;
  std::vector<BoundCheck> checks;
  bool perturbed_real = true;
  SolverPath base_path = SolverPath::Similarity;
  SolverPath perturbed_path = SolverPath::Similarity;
  std::optional<KappaBundle> bundle;

  bool all_applicable_pass() const;
};

VerificationReport verify_bounds(const ModelSpec& spec, const SymmetricMatrix& delta_v, double shift);

}  // namespace kg
