// kg: spectra, perturbation bounds, sweeps and example reproduction for
// Klein-Gordon block operators.

#include "kg/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--sweep-range", "expected a:b");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--sweep-range", "expected a:b with real endpoints, got " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon operator spectra and relative perturbation bounds"};
  app.require_subcommand(1);

  kg::RunConfig cfg;
  std::string model_path, range, format = "csv", out;
  double tau = 0, eta = 0, alpha = 0, beta = 0, half_width = 0, shift = 0;
  int grid_points = 0;
  std::string target;

  auto add_model_flags = [&](CLI::App* sub, bool perturbation) {
    sub->add_option("--model", model_path, "Model file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--tau", tau, "Square-well coupling");
    sub->add_option("--alpha", alpha, "Harmonic field strength");
    sub->add_option("--beta", beta, "Harmonic mass offset");
    sub->add_option("--grid-points", grid_points, "Harmonic grid size N")->check(CLI::PositiveNumber);
    sub->add_option("--half-width", half_width, "Harmonic half width L")->check(CLI::PositiveNumber);
    auto* s = sub->add_option("--shift", shift, "Explicit shift mu");
    auto* o = sub->add_flag("--optimize-shift", "Minimize ||(V - mu) U^{-1}|| over mu");
    auto* p = sub->add_flag("--paper-shift", "Reference shift: -tau/2 for the square well, 0 for the harmonic model");
    s->excludes(o)->excludes(p);
    o->excludes(p);
    if (perturbation) {
      sub->add_option("--eta", eta, "Perturbation strength");
      sub->add_option("--seed", cfg.seed, "Seed for random perturbations of explicit models");
    }
    sub->add_option("--out", out, "Output file");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "report"}));
  };

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues, sign types and pencil residuals");
  add_model_flags(spectrum, false);
  auto* bounds = app.add_subcommand("bounds", "Perturbation constants and predicted spectral gaps");
  add_model_flags(bounds, true);
  auto* verify = app.add_subcommand("verify", "Compare true relative eigenvalue deviations with the bounds");
  add_model_flags(verify, true);
  auto* sweep = app.add_subcommand("sweep", "Eigenvalue trajectories along V(t) = t V1");
  add_model_flags(sweep, false);
  sweep->add_option("--sweep-range", range, "Parameter range a:b");
  sweep->add_option("--steps", cfg.steps, "Number of grid points")->check(CLI::Range(2, 1000000));
  auto* reproduce = app.add_subcommand("reproduce", "Reproduce a reference example");
  reproduce->add_option("which", target, "example1 or example2")->required()->check(CLI::IsMember({"example1", "example2"}));
  reproduce->add_option("--grid-points", grid_points, "Harmonic grid size N (example1)")->check(CLI::PositiveNumber);
  reproduce->add_option("--half-width", half_width, "Harmonic half width L (example1)")->check(CLI::PositiveNumber);
  reproduce->add_option("--out", out, "Directory for CSV and JSON files");
  reproduce->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "report"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kg::kExitOk : kg::kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };

  if (sub == spectrum) cfg.command = kg::Command::Spectrum;
  if (sub == bounds) cfg.command = kg::Command::Bounds;
  if (sub == verify) cfg.command = kg::Command::Verify;
  if (sub == sweep) cfg.command = kg::Command::Sweep;
  if (sub == reproduce) cfg.command = kg::Command::Reproduce;

  if (given("--model")) cfg.model_path = model_path;
  if (given("--tau")) cfg.tau = tau;
  if (given("--eta")) cfg.eta = eta;
  if (given("--alpha")) cfg.alpha = alpha;
  if (given("--beta")) cfg.beta = beta;
  if (given("--grid-points")) cfg.grid_points = grid_points;
  if (given("--half-width")) cfg.half_width = half_width;
  if (given("--shift")) {
    cfg.shift_policy = kg::ShiftPolicy::Explicit;
    cfg.shift_value = shift;
  }
  if (given("--optimize-shift")) cfg.shift_policy = kg::ShiftPolicy::Optimized;
  if (given("--paper-shift")) cfg.shift_policy = kg::ShiftPolicy::Reference;
  if (given("--out")) cfg.output_path = out;
  cfg.format = format == "report" ? kg::OutputFormat::Report : kg::OutputFormat::Csv;
  cfg.reproduce_target = target;
  if (given("--sweep-range")) {
    try {
      cfg.sweep_range = parse_range(range);
    } catch (const CLI::ParseError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kg::kExitUsage;
    }
  }

  return kg::run(cfg, std::cout, std::cerr);
}
