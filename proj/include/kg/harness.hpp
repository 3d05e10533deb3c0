#pragma once

// Command implementations behind the `kg` tool. Every command returns plain
// data; rendering to CSV or JSON is separate so the same results back the
// CLI, the tests and the Python module.

#include "kg/bounds.hpp"
#include "kg/error.hpp"
#include "kg/models.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kg {

enum class Command { Spectrum, Bounds, Verify, Sweep, Reproduce };
enum class ShiftPolicy { Reference, None, Explicit, Optimized };
enum class OutputFormat { Csv, Report };

/// Process exit status per error category.
enum ExitStatus : int { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitValidation = 3, kExitSolver = 4 };

int exit_status(ErrorCategory c);

struct RunConfig {
  Command command = Command::Spectrum;
  std::optional<std::filesystem::path> model_path;
  std::optional<double> tau;
  std::optional<double> eta;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> grid_points;
  std::optional<double> half_width;
  ShiftPolicy shift_policy = ShiftPolicy::Reference;
  double shift_value = 0.0;
  std::optional<std::pair<double, double>> sweep_range;
  int steps = 101;
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> output_path;
  OutputFormat format = OutputFormat::Csv;
  std::string reproduce_target;  // example1 | example2
};

/// Exactly one of --model, --tau (square well), --alpha (harmonic).
ModelDescription resolve_model(const RunConfig& cfg);

/// Reference policy: -tau/2 for the square well, 0 for the harmonic model, the
/// optimizer for explicit models. Verification of a square well maps the
/// optimized policy to -tau/2 as well so the reference tables are reproduced.
double resolve_shift(const RunConfig& cfg, const ModelDescription& model);

double perturbation_strength(const RunConfig& cfg, const ModelDescription& model);

/// Square well: diag(-eta, 0). Harmonic: eta * diag(x). Explicit: seeded random.
SymmetricMatrix resolve_perturbation(const RunConfig& cfg, const ModelDescription& model);

/// V1 of the sweep family V(t) = t V1.
SymmetricMatrix sweep_direction(const ModelDescription& model);

// ---------------------------------------------------------------------------
// spectrum

/// Relative factor applied to pencil_scale above which a residual fails the run.
inline constexpr double kPencilFailFactor = 1e-6;

struct SpectrumRow {
  Index index = 0;
  Complex eigenvalue;
  SignType sign_type = SignType::Positive;
  double pencil_residual = 0.0;
  double pencil_scale = 0.0;
};

struct SpectrumResult {
  double shift = 0.0;
  double contraction = 0.0;
  SpectrumReport report;
  std::vector<SpectrumRow> rows;
  bool residuals_ok = true;
};

/// Residuals are smallest singular values of the pencil up to order 64 and
/// |Q(lambda) z| / |z| with z = U^{-1/2} x_1 from the eigenvector beyond.
SpectrumResult run_spectrum(const ModelSpec& spec, double shift);

// ---------------------------------------------------------------------------
// bounds

struct BoundsResult {
  double shift = 0.0;
  double eta = 0.0;
  double gap_alpha = 0.0;
  double norm_j1 = 1.0;
  double norm_delta_h = 0.0;
  PerturbationSpec perturbation;
  KappaBundle bundle;
  Interval gap;  // relative to the shift
  std::optional<GapInclusion> plain;
  std::optional<Interval> improved;
  Interval uniform;
  BlockStructure structure;
};

BoundsResult run_bounds(const ModelSpec& spec, const SymmetricMatrix& delta_v, double shift, double eta);

// ---------------------------------------------------------------------------
// sweep

struct SweepPoint {
  double parameter = 0.0;
  ComplexVector eigenvalues;
  bool real = true;
  bool defective = false;
  double inner_gap = 0.0;  // closest real pair of opposite type; 0 once the spectrum leaves the real line
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> critical_value;
};

/// Tolerance of the bisection for the critical coupling.
inline constexpr double kCriticalTolerance = 1e-7;

SweepPoint sweep_point(const ModelSpec& base, const SymmetricMatrix& direction, double t);
SweepResult run_sweep(const ModelSpec& base, const SymmetricMatrix& direction, double lo, double hi, int steps);

// ---------------------------------------------------------------------------
// reproduce

struct Example2Result {
  std::array<double, 3> taus{0.0, 1.0, 1.7};
  std::array<double, 3> etas{0.001, 0.1, 0.3};
  std::array<std::array<double, 3>, 3> distances{};
  std::array<std::array<double, 3>, 3> bounds{};
  std::array<double, 3> contraction{};
  double v_u_inv_ratio = 0.0;   // ||V U^{-1}|| / tau
  double v_u2_inv_ratio = 0.0;  // ||V U^{-2}|| / tau
  std::vector<std::string> notes;
};

Example2Result reproduce_example2();

struct Example1Row {
  double alpha = 0.0;
  double beta = 0.0;
  int level = 0;
  double computed_plus = 0.0;
  double computed_minus = 0.0;
  double exact_plus = 0.0;
  double exact_minus = 0.0;
  double error_plus = 0.0;
  double error_minus = 0.0;
  double residual_plus = 0.0;   // pencil residual relative to pencil_scale
  double residual_minus = 0.0;
};

struct Example1Sensitivity {
  double alpha = 0.5;
  double epsilon = 1e-4;
  double relative_change = 0.0;  // (mu(alpha + eps) - mu(alpha)) / mu(alpha), discretized
  double computed_ratio = 0.0;   // relative_change / eps
  double exact_ratio = 0.0;      // -(3/2) alpha / (1 - alpha^2)
  double bound = 0.0;            // eps / (1 - alpha)
  double factor = 0.0;           // (3/2) alpha / (1 + alpha)
};

struct Example1Result {
  int grid_points = 1000;
  double half_width = 12.0;
  std::vector<Example1Row> rows;
  Example1Sensitivity sensitivity;
};

Example1Result reproduce_example1(int grid_points = 1000, double half_width = 12.0);

// ---------------------------------------------------------------------------
// rendering

std::string spectrum_csv(const SpectrumResult& r);
std::string spectrum_json(const SpectrumResult& r, const ModelDescription& model);
std::string verification_csv(const VerificationReport& r);
std::string verification_json(const VerificationReport& r, const ModelDescription& model, double eta);
std::string bounds_csv(const BoundsResult& r);
std::string bounds_json(const BoundsResult& r, const ModelDescription& model);
std::string sweep_csv(const SweepResult& r);
std::string sweep_json(const SweepResult& r, const ModelDescription& model);
std::string example2_tables(const Example2Result& r);
std::string example2_distances_csv(const Example2Result& r);
std::string example2_bounds_csv(const Example2Result& r);
std::string example2_json(const Example2Result& r);
std::string example1_table(const Example1Result& r);
std::string example1_csv(const Example1Result& r);
std::string example1_json(const Example1Result& r);

/// Runs one command, writing the primary output to `out` (or the configured
/// file) and diagnostics to `err`. Returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace kg
