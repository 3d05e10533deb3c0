#pragma once

#include "kg/operator_core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace kg {

/// U^2 = -d^2/dx^2 + x^2 + beta, V = alpha x, discretized on N interior points
/// of (-L, L) with Dirichlet ends.
struct HarmonicParams {
  double alpha = 0.0;
  double beta = 0.0;
  int grid_points = 1000;
  double half_width = 12.0;
};

struct SquareWellParams {
  double tau = 0.0;
  std::optional<double> eta;
};

ModelSpec harmonic_model(const HarmonicParams& p);

struct HarmonicEigenvalues {
  double mu_plus = 0.0;
  double mu_minus = 0.0;
};

/// Closed-form n-th eigenvalue pair of the continuum oscillator model,
/// +-sqrt((1 - a^2) beta + (1 - a^2)^{3/2} (1 + 2n)). Requires 0 <= alpha < 1.
HarmonicEigenvalues exact_harmonic_eigs(double alpha, double beta, int n);

/// d log mu / d alpha at beta = 0, i.e. -(3/2) alpha / (1 - alpha^2).
double harmonic_sensitivity(double alpha);

/// U^2 = [[2, -1], [-1, 2]], V = tau [[-1, 0], [0, 0]].
ModelSpec square_well_model(const SquareWellParams& p);

/// Sign convention for the square-well perturbation.
///  Coupling: dV = diag(-eta, 0), i.e. the coupling tau -> tau + eta.
///  Literal:  dV = diag(+eta, 0).
enum class WellPerturbation { Coupling, Literal };

SymmetricMatrix square_well_perturbation(double eta, WellPerturbation sign = WellPerturbation::Coupling);

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then
/// two xor-shift-multiply rounds with 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
/// Doubles are the top 53 bits scaled by 2^-53, so streams are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Symmetric dV with entries uniform on [-scale, scale], upper triangle drawn
/// row by row and mirrored.
SymmetricMatrix random_perturbation(Index order, double scale, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Model files

enum class ModelKind { Explicit, Harmonic, SquareWell };

const char* to_string(ModelKind k);

/// A model together with the parameters it was generated from, if any.
struct ModelDescription {
  ModelKind kind = ModelKind::Explicit;
  ModelSpec spec;
  HarmonicParams harmonic;
  SquareWellParams square_well;

  static ModelDescription from_spec(ModelSpec spec);
  static ModelDescription from_harmonic(const HarmonicParams& p);
  static ModelDescription from_square_well(const SquareWellParams& p);
};

/// Parses the JSON model format; `source` names the input in diagnostics.
ModelDescription parse_model(std::string_view text, const std::string& source = "<input>");
ModelDescription load_model_description(const std::filesystem::path& path);
ModelSpec load_model(const std::filesystem::path& path);

/// Explicit form, reals with 17 significant digits.
std::string serialize_model(const ModelSpec& spec);
void save_model(const ModelSpec& spec, const std::filesystem::path& path);

}  // namespace kg
