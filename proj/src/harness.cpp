#include "kg/harness.hpp"

#include "kg/error.hpp"
#include "kg/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kg {

namespace {

using ojson = nlohmann::ordered_json;

double symmetric_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

ojson real_json(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson interval_json(const Interval& i, double offset = 0.0) {
  return ojson{{"lower", real_json(i.lower + offset)}, {"upper", real_json(i.upper + offset)}};
}

ojson model_json(const ModelDescription& m) {
  ojson j{{"kind", to_string(m.kind)}, {"label", m.spec.label()}, {"order", m.spec.order()}};
  if (m.kind == ModelKind::Harmonic) {
    j["alpha"] = m.harmonic.alpha;
    j["beta"] = m.harmonic.beta;
    j["grid_points"] = m.harmonic.grid_points;
    j["half_width"] = m.harmonic.half_width;
  } else if (m.kind == ModelKind::SquareWell) {
    j["tau"] = m.square_well.tau;
  }
  return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, path.string() + ": cannot write file");
  f << text;
}

}  // namespace

int exit_status(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Parse: return kExitParse;
    case ErrorCategory::Validation: return kExitValidation;
    case ErrorCategory::Solver: return kExitSolver;
  }
  return kExitSolver;
}

// ---------------------------------------------------------------------------
// configuration

namespace {

// Out-of-range model parameters are validation failures, not usage errors.
template <class F>
ModelDescription as_validation(F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::Usage) throw;
    throw Error(ErrorCode::ValidationError, e.what());
  }
}

}  // namespace

ModelDescription resolve_model(const RunConfig& cfg) {
  const int sources = int(cfg.model_path.has_value()) + int(cfg.tau.has_value()) + int(cfg.alpha.has_value());
  if (sources != 1) {
    throw Error(ErrorCode::InvalidArgument, "exactly one model source is required: --model, --tau or --alpha");
  }
  if (cfg.model_path) {
    if (cfg.beta || cfg.grid_points || cfg.half_width) {
      throw Error(ErrorCode::InvalidArgument, "--beta, --grid-points and --half-width apply to --alpha only");
    }
    return load_model_description(*cfg.model_path);
  }
  if (cfg.tau) {
    if (cfg.beta || cfg.grid_points || cfg.half_width) {
      throw Error(ErrorCode::InvalidArgument, "--beta, --grid-points and --half-width apply to --alpha only");
    }
    SquareWellParams p;
    p.tau = *cfg.tau;
    p.eta = cfg.eta;
    return as_validation([&] { return ModelDescription::from_square_well(p); });
  }
  HarmonicParams p;
  p.alpha = *cfg.alpha;
  p.beta = cfg.beta.value_or(0.0);
  p.grid_points = cfg.grid_points.value_or(p.grid_points);
  p.half_width = cfg.half_width.value_or(p.half_width);
  return as_validation([&] { return ModelDescription::from_harmonic(p); });
}

double resolve_shift(const RunConfig& cfg, const ModelDescription& model) {
  const bool well = model.kind == ModelKind::SquareWell;
  switch (cfg.shift_policy) {
    case ShiftPolicy::None: return 0.0;
    case ShiftPolicy::Explicit: return cfg.shift_value;
    case ShiftPolicy::Optimized:
      if (well && cfg.command == Command::Verify) return -model.square_well.tau / 2.0;
      return optimize_shift(model.spec).shift;
    case ShiftPolicy::Reference:
      if (well) return -model.square_well.tau / 2.0;
      if (model.kind == ModelKind::Harmonic) return 0.0;
      return optimize_shift(model.spec).shift;
  }
  return 0.0;
}

double perturbation_strength(const RunConfig& cfg, const ModelDescription& model) {
  if (cfg.eta) return *cfg.eta;
  if (model.kind == ModelKind::SquareWell && model.square_well.eta) return *model.square_well.eta;
  return 0.0;
}

SymmetricMatrix resolve_perturbation(const RunConfig& cfg, const ModelDescription& model) {
  const double eta = perturbation_strength(cfg, model);
  switch (model.kind) {
    case ModelKind::SquareWell: return square_well_perturbation(eta);
    case ModelKind::Harmonic: {
      const double alpha = model.harmonic.alpha;
      if (alpha != 0.0) return SymmetricMatrix(model.spec.v().matrix() * (eta / alpha));
      HarmonicParams unit = model.harmonic;
      unit.alpha = 1.0;
      return SymmetricMatrix(harmonic_model(unit).v().matrix() * eta);
    }
    case ModelKind::Explicit: return random_perturbation(model.spec.order(), eta, cfg.seed);
  }
  return SymmetricMatrix::zero(model.spec.order());
}

SymmetricMatrix sweep_direction(const ModelDescription& model) {
  switch (model.kind) {
    case ModelKind::SquareWell: {
      Matrix v = Matrix::Zero(2, 2);
      v(0, 0) = -1.0;
      return SymmetricMatrix(v);
    }
    case ModelKind::Harmonic: {
      HarmonicParams unit = model.harmonic;
      unit.alpha = 1.0;
      return harmonic_model(unit).v();
    }
    case ModelKind::Explicit: return model.spec.v();
  }
  return model.spec.v();
}

// ---------------------------------------------------------------------------
// spectrum

SpectrumResult run_spectrum(const ModelSpec& spec, double shift) {
  const KleinGordonSystem sys = assemble_system(spec, shift);
  SpectrumResult out;
  out.shift = shift;
  out.contraction = sys.contraction;
  out.report = eigen_spectrum(sys);

  const Index n = spec.order();
  const Matrix& v = spec.v().matrix();
  const Matrix& u2 = spec.u_squared().matrix();
  const double u2_norm = symmetric_norm(u2);
  const double v_norm = symmetric_norm(v);
  const auto& rep = out.report;
  for (Index k = 0; k < rep.eigenvalues.size(); ++k) {
    SpectrumRow row;
    row.index = k;
    row.eigenvalue = rep.eigenvalues(k);
    row.sign_type = rep.sign_types[static_cast<std::size_t>(k)];
    row.pencil_scale = u2_norm + std::norm(row.eigenvalue) + v_norm * v_norm;
    if (n <= kPencilDenseOrder || !rep.has_vectors()) {
      row.pencil_residual = pencil_residual(spec, row.eigenvalue);
    } else {
      // H x = lambda x gives Q(lambda) z = 0 for z = U^{-1/2} x_1.
      const ComplexVector z = sys.u_inv_quarter.cast<Complex>() * rep.eigenvectors.col(k).head(n);
      const ComplexMatrix vc = v.cast<Complex>();
      ComplexVector w = row.eigenvalue * z - vc * z;
      w = row.eigenvalue * w - vc * w;
      w -= u2.cast<Complex>() * z;
      row.pencil_residual = w.norm() / z.norm();
    }
    if (!(row.pencil_residual <= kPencilFailFactor * row.pencil_scale)) out.residuals_ok = false;
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// bounds

BoundsResult run_bounds(const ModelSpec& spec, const SymmetricMatrix& delta_v, double shift, double eta) {
  if (delta_v.order() != spec.order()) throw Error(ErrorCode::DimensionMismatch, "perturbation order differs from model order");
  const UnitRoots roots = unit_roots(spec.u_squared());
  const KleinGordonSystem sys = assemble_system(spec, shift, roots);
  BoundsResult out;
  out.shift = shift;
  out.eta = eta;
  out.perturbation = analyze_perturbation(sys, delta_v);
  out.bundle = perturbation_constants(sys, out.perturbation);
  out.gap_alpha = gap_bound(sys);
  out.structure = block_structure_analysis(sys.a_matrix, out.perturbation.delta_a);

  SpectrumOptions values_only;
  values_only.compute_vectors = false;
  values_only.check_defects = false;
  const SpectrumReport rep = eigen_spectrum(sys, values_only);
  const Interval gap = central_gap(rep, shift);
  out.gap = {gap.lower - shift, gap.upper - shift};

  const ModelSpec perturbed = spec.with_potential(SymmetricMatrix(spec.v().matrix() + delta_v.matrix()));
  const KleinGordonSystem sys1 = assemble_system(perturbed, shift, roots);
  out.norm_delta_h = spectral_norm(sys1.hamiltonian - sys.hamiltonian);
  out.norm_j1 = sign_operator(sys).norm_j1;
  out.uniform = norm_bound_interval(out.gap, out.norm_delta_h, out.norm_j1);

  const KappaBundle& k = out.bundle;
  if (k.general.valid) out.plain = gap_inclusion(out.gap, k.general.value);
  if (k.exact.valid) out.improved = improved_inclusion(out.gap, k.exact.minus, k.exact.plus);
  return out;
}

// ---------------------------------------------------------------------------
// sweep

SweepPoint sweep_point(const ModelSpec& base, const SymmetricMatrix& direction, double t) {
  const ModelSpec spec = base.with_potential(SymmetricMatrix(t * direction.matrix()), base.label());
  const double shift = optimize_shift(spec).shift;
  const KleinGordonSystem sys = assemble_system(spec, shift);
  SpectrumOptions opts;
  opts.compute_vectors = false;
  const SpectrumReport rep = eigen_spectrum(sys, opts);

  SweepPoint p;
  p.parameter = t;
  p.eigenvalues = rep.eigenvalues;
  p.real = rep.is_real_spectrum;
  p.defective = rep.defective;
  if (!p.real || p.defective) {
    p.inner_gap = 0.0;
  } else {
    double gap = std::numeric_limits<double>::infinity();
    for (double a : rep.positive_ordered) {
      for (double b : rep.negative_ordered) gap = std::min(gap, std::abs(a - b));
    }
    p.inner_gap = gap;
  }
  return p;
}

SweepResult run_sweep(const ModelSpec& base, const SymmetricMatrix& direction, double lo, double hi, int steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "sweep needs at least 2 steps");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "sweep range must satisfy a < b");
  if (direction.order() != base.order()) throw Error(ErrorCode::DimensionMismatch, "sweep direction order differs from model order");

  SweepResult out;
  for (int i = 0; i < steps; ++i) {
    const double t = i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    out.points.push_back(sweep_point(base, direction, t));
  }

  auto bad = [](const SweepPoint& p) { return !p.real || p.defective; };
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (!bad(out.points[i])) continue;
    if (i == 0) {
      out.critical_value = out.points[0].parameter;
      break;
    }
    double a = out.points[i - 1].parameter;
    double b = out.points[i].parameter;
    while (b - a > kCriticalTolerance) {
      const double mid = 0.5 * (a + b);
      if (bad(sweep_point(base, direction, mid))) b = mid;
      else a = mid;
    }
    out.critical_value = 0.5 * (a + b);
    break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// reproduce

Example2Result reproduce_example2() {
  Example2Result r;
  for (std::size_t i = 0; i < r.taus.size(); ++i) {
    const double tau = r.taus[i];
    const ModelSpec spec = square_well_model({tau, std::nullopt});
    const double shift = -tau / 2.0;
    r.contraction[i] = contraction_bound(spec, shift);
    for (std::size_t j = 0; j < r.etas.size(); ++j) {
      const VerificationReport v = verify_bounds(spec, square_well_perturbation(r.etas[j]), shift);
      r.distances[i][j] = v.max_deviation;
      r.bounds[i][j] = v.bundle ? v.bundle->norm_product.value : std::numeric_limits<double>::quiet_NaN();
    }
  }

  const ModelSpec unit = square_well_model({1.0, std::nullopt});
  const UnitRoots roots = unit_roots(unit.u_squared());
  const Matrix& v = unit.v().matrix();
  r.v_u_inv_ratio = spectral_norm(v * roots.u_inv);
  r.v_u2_inv_ratio = spectral_norm(v * roots.u_inv * roots.u_inv);

  r.notes.push_back("the narrative lists couplings 0, 1, 1.8 while the tables are labelled t = 1.7; "
                    "the bound 6.6667e-03 = 0.001 / (1 - 1.7/2) confirms 1.7, which is used here");
  r.notes.push_back("||V U^{-1}|| / tau = " + format_scientific(r.v_u_inv_ratio) +
                    " (sqrt(2/3)); the quoted 0.745 is ||V U^{-2}|| / tau = " + format_scientific(r.v_u2_inv_ratio) +
                    " (sqrt(5)/3)");
  r.notes.push_back("perturbation applied as dV = diag(-eta, 0), i.e. tau -> tau + eta; "
                    "dV = diag(+eta, 0) reproduces the t = 0 row only");
  r.notes.push_back("bounds are eta / (1 - tau/2) = ||dV|| ||U^{-1}|| / (1 - b); at t = 1.7, eta = 0.3 the "
                    "constant is 2 > 1 and certifies nothing; the perturbed system has the defective coupling 2");
  return r;
}

Example1Result reproduce_example1(int grid_points, double half_width) {
  Example1Result out;
  out.grid_points = grid_points;
  out.half_width = half_width;
  SpectrumOptions opts;
  opts.compute_vectors = false;
  opts.check_defects = false;

  // U^2 does not depend on alpha, so its roots are shared along each beta.
  std::optional<UnitRoots> roots[2];
  auto solve = [&](double alpha, double beta) {
    const ModelSpec spec = harmonic_model({alpha, beta, grid_points, half_width});
    auto& r = roots[beta == 0.0 ? 0 : 1];
    if (!r) r = unit_roots(spec.u_squared());
    return std::pair{spec, eigen_spectrum(assemble_system(spec, 0.0, *r), opts)};
  };

  for (double beta : {0.0, 1.0}) {
    for (double alpha : {0.0, 0.3, 0.6}) {
      const auto [spec, rep] = solve(alpha, beta);
      const double u2_norm = symmetric_norm(spec.u_squared().matrix());
      const double v_norm = symmetric_norm(spec.v().matrix());
      for (int level = 0; level < 3; ++level) {
        const auto idx = static_cast<std::size_t>(level);
        if (idx >= rep.positive_ordered.size() || idx >= rep.negative_ordered.size()) {
          throw Error(ErrorCode::SolverFailure, "too few eigenvalues of each type");
        }
        Example1Row row;
        row.alpha = alpha;
        row.beta = beta;
        row.level = level;
        row.computed_plus = rep.positive_ordered[idx];
        row.computed_minus = rep.negative_ordered[idx];
        const HarmonicEigenvalues ex = exact_harmonic_eigs(alpha, beta, level);
        row.exact_plus = ex.mu_plus;
        row.exact_minus = ex.mu_minus;
        row.error_plus = std::abs(row.computed_plus - row.exact_plus);
        row.error_minus = std::abs(row.computed_minus - row.exact_minus);
        auto rel_residual = [&](double lambda) {
          return pencil_residual(spec, Complex(lambda, 0.0)) / (u2_norm + lambda * lambda + v_norm * v_norm);
        };
        row.residual_plus = rel_residual(row.computed_plus);
        row.residual_minus = rel_residual(row.computed_minus);
        out.rows.push_back(row);
      }
    }
  }

  Example1Sensitivity& s = out.sensitivity;
  const double mu0 = solve(s.alpha, 0.0).second.positive_ordered.at(0);
  const double mu1 = solve(s.alpha + s.epsilon, 0.0).second.positive_ordered.at(0);
  s.relative_change = (mu1 - mu0) / mu0;
  s.computed_ratio = s.relative_change / s.epsilon;
  s.exact_ratio = harmonic_sensitivity(s.alpha);
  s.bound = s.epsilon / (1.0 - s.alpha);
  s.factor = 1.5 * s.alpha / (1.0 + s.alpha);
  return out;
}

// ---------------------------------------------------------------------------
// rendering

std::string spectrum_csv(const SpectrumResult& r) {
  std::ostringstream o;
  o << "index,eigenvalue_re,eigenvalue_im,sign_type,pencil_residual\n";
  for (const auto& row : r.rows) {
    o << row.index << ',' << format_real(row.eigenvalue.real()) << ',' << format_real(row.eigenvalue.imag()) << ','
      << to_string(row.sign_type) << ',' << format_real(row.pencil_residual) << '\n';
  }
  return o.str();
}

std::string spectrum_json(const SpectrumResult& r, const ModelDescription& model) {
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"index", row.index},
                    {"eigenvalue_re", row.eigenvalue.real()},
                    {"eigenvalue_im", row.eigenvalue.imag()},
                    {"sign_type", to_string(row.sign_type)},
                    {"pencil_residual", row.pencil_residual},
                    {"pencil_scale", row.pencil_scale}});
  }
  ojson j{{"command", "spectrum"},
          {"model", model_json(model)},
          {"shift", r.shift},
          {"contraction", r.contraction},
          {"solver_path", to_string(r.report.path)},
          {"is_real_spectrum", r.report.is_real_spectrum},
          {"defective", r.report.defective},
          {"residuals_ok", r.residuals_ok},
          {"eigenvalues", rows}};
  if (r.report.is_real_spectrum) j["central_gap"] = interval_json(r.report.central_gap);
  return dump(j);
}

std::string verification_csv(const VerificationReport& r) {
  std::ostringstream o;
  o << "kind,name,lambda,lambda_prime,value,valid,pass\n";
  for (const auto& row : r.rows) {
    o << "eigenvalue,," << format_real(row.lambda) << ',' << format_real(row.lambda_prime) << ','
      << format_real(row.relative_deviation) << ",,\n";
  }
  for (const auto& c : r.checks) {
    o << "kappa," << c.name << ",,," << format_real(c.value) << ',' << bool_text(c.applicable) << ','
      << bool_text(c.pass) << '\n';
  }
  o << "summary,shift,,," << format_real(r.shift) << ",,\n";
  o << "summary,contraction,,," << format_real(r.contraction) << ',' << bool_text(r.contraction < 1.0) << ",\n";
  o << "summary,max_relative_deviation,,," << format_real(r.max_deviation) << ",," << bool_text(r.all_applicable_pass())
    << '\n';
  return o.str();
}

std::string verification_json(const VerificationReport& r, const ModelDescription& model, double eta) {
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"lambda", row.lambda}, {"lambda_prime", row.lambda_prime}, {"relative_deviation", row.relative_deviation}});
  }
  ojson checks = ojson::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"value", real_json(c.value)}, {"valid", c.applicable}, {"pass", c.pass}});
  }
  return dump(ojson{{"command", "verify"},
                    {"model", model_json(model)},
                    {"eta", eta},
                    {"shift", r.shift},
                    {"contraction", r.contraction},
                    {"contraction_perturbed", r.contraction_perturbed},
                    {"base_path", to_string(r.base_path)},
                    {"perturbed_path", to_string(r.perturbed_path)},
                    {"perturbed_real", r.perturbed_real},
                    {"max_relative_deviation", r.max_deviation},
                    {"max_relative_deviation_display", format_scientific(r.max_deviation)},
                    {"all_valid_bounds_hold", r.all_applicable_pass()},
                    {"pairs", rows},
                    {"checks", checks}});
}

namespace {

std::vector<std::pair<std::string, std::pair<double, bool>>> kappa_list(const KappaBundle& k) {
  std::vector<std::pair<std::string, std::pair<double, bool>>> out{
      {"kappa_general", {k.general.value, k.general.valid}},
      {"kappa_sum", {k.sum.value, k.sum.valid}},
      {"kappa_norm_product", {k.norm_product.value, k.norm_product.valid}},
  };
  if (k.relative) out.push_back({"kappa_relative", {k.relative->value, k.relative->valid}});
  if (k.disjoint) out.push_back({"kappa_disjoint", {k.disjoint->value, k.disjoint->valid}});
  if (k.signed_pair) {
    out.push_back({"kappa_signed_minus", {k.signed_pair->minus, k.signed_pair->valid}});
    out.push_back({"kappa_signed_plus", {k.signed_pair->plus, k.signed_pair->valid}});
  }
  out.push_back({"kappa_structured_minus", {k.structured.minus, k.structured.valid}});
  out.push_back({"kappa_structured_plus", {k.structured.plus, k.structured.valid}});
  out.push_back({"kappa_exact_minus", {k.exact.minus, k.exact.valid}});
  out.push_back({"kappa_exact_plus", {k.exact.plus, k.exact.valid}});
  if (k.rescaled_valid) {
    out.push_back({"kappa0_hat", {k.kappa0_hat, true}});
    out.push_back({"kappa_prime_hat", {k.kappa_prime_hat, true}});
  }
  return out;
}

}  // namespace

std::string bounds_csv(const BoundsResult& r) {
  std::ostringstream o;
  o << "quantity,value,valid\n";
  o << "shift," << format_real(r.shift) << ",\n";
  o << "eta," << format_real(r.eta) << ",\n";
  o << "contraction," << format_real(r.bundle.b) << ',' << bool_text(r.bundle.b < 1.0) << '\n';
  o << "c," << format_real(r.bundle.c) << ",\n";
  o << "gap_alpha," << format_real(r.gap_alpha) << ",\n";
  for (const auto& [name, e] : kappa_list(r.bundle)) {
    o << name << ',' << format_real(e.first) << ',' << bool_text(e.second) << '\n';
  }
  auto interval = [&](const std::string& name, const std::optional<Interval>& i) {
    o << name << "_lower," << (i ? format_real(i->lower) : "") << ',' << bool_text(i.has_value()) << '\n';
    o << name << "_upper," << (i ? format_real(i->upper) : "") << ',' << bool_text(i.has_value()) << '\n';
  };
  interval("gap", r.gap);
  interval("plain", r.plain ? std::optional<Interval>(r.plain->predicted) : std::nullopt);
  interval("improved", r.improved);
  interval("uniform", r.uniform);
  return o.str();
}

std::string bounds_json(const BoundsResult& r, const ModelDescription& model) {
  const KappaBundle& k = r.bundle;
  ojson kappas = ojson::object();
  for (const auto& [name, e] : kappa_list(k)) kappas[name] = {{"value", real_json(e.first)}, {"valid", e.second}};
  ojson intervals{{"note", "intervals are relative to the shift; absolute endpoints add the shift"},
                  {"gap", interval_json(r.gap)}};
  if (r.plain) {
    intervals["plain"] = interval_json(r.plain->predicted);
    intervals["plain"]["case"] = to_string(r.plain->case_tag);
    intervals["plain"]["kappa"] = k.general.value;
  } else {
    intervals["plain"] = nullptr;
  }
  if (r.improved) {
    intervals["improved"] = interval_json(*r.improved);
    intervals["improved"]["source"] = "exact";
  } else {
    intervals["improved"] = nullptr;
  }
  intervals["uniform"] = interval_json(r.uniform);
  intervals["uniform"]["norm_delta_h"] = r.norm_delta_h;
  intervals["uniform"]["norm_j1"] = r.norm_j1;
  return dump(ojson{{"command", "bounds"},
                    {"model", model_json(model)},
                    {"eta", r.eta},
                    {"shift", r.shift},
                    {"contraction", k.b},
                    {"c", k.c},
                    {"norm_delta_v", r.perturbation.norm_delta_v},
                    {"disjoint", r.perturbation.disjoint},
                    {"sign_condition", r.perturbation.sign_condition ? ojson(to_string(*r.perturbation.sign_condition))
                                                                     : ojson(nullptr)},
                    {"gap_alpha", r.gap_alpha},
                    {"block_structure",
                     {{"a_minus", r.structure.a_minus},
                      {"a_plus", r.structure.a_plus},
                      {"norm_b", r.structure.norm_b},
                      {"kappa_minus", r.structure.kappa_minus},
                      {"kappa_plus", r.structure.kappa_plus}}},
                    {"kappas", kappas},
                    {"rescaled_source", k.rescaled_source},
                    {"intervals", intervals}});
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream o;
  o << "parameter,index,eigenvalue_re,eigenvalue_im,real,defective,inner_gap\n";
  for (const auto& p : r.points) {
    for (Index k = 0; k < p.eigenvalues.size(); ++k) {
      o << format_real(p.parameter) << ',' << k << ',' << format_real(p.eigenvalues(k).real()) << ','
        << format_real(p.eigenvalues(k).imag()) << ',' << bool_text(p.real) << ',' << bool_text(p.defective) << ','
        << format_real(p.inner_gap) << '\n';
    }
  }
  return o.str();
}

std::string sweep_json(const SweepResult& r, const ModelDescription& model) {
  ojson points = ojson::array();
  for (const auto& p : r.points) {
    ojson re = ojson::array(), im = ojson::array();
    for (Index k = 0; k < p.eigenvalues.size(); ++k) {
      re.push_back(p.eigenvalues(k).real());
      im.push_back(p.eigenvalues(k).imag());
    }
    points.push_back({{"parameter", p.parameter},
                      {"real", p.real},
                      {"defective", p.defective},
                      {"inner_gap", real_json(p.inner_gap)},
                      {"eigenvalue_re", re},
                      {"eigenvalue_im", im}});
  }
  return dump(ojson{{"command", "sweep"},
                    {"model", model_json(model)},
                    {"family", "V(t) = t V1"},
                    {"critical_value", r.critical_value ? ojson(*r.critical_value) : ojson(nullptr)},
                    {"critical_tolerance", kCriticalTolerance},
                    {"points", points}});
}

namespace {

std::string tau_label(double tau) {
  std::ostringstream o;
  o << tau;
  return o.str();
}

template <class Cell>
std::string grid_table(const Example2Result& r, Cell cell) {
  std::ostringstream o;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-8s| %-14s| %-14s| %-14s\n", "", "eta = 0.001", "eta = 0.1", "eta = 0.3");
  o << buf;
  for (std::size_t i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof buf, "%-8s| %-14s| %-14s| %-14s\n", ("t = " + tau_label(r.taus[i])).c_str(),
                  cell(i, 0).c_str(), cell(i, 1).c_str(), cell(i, 2).c_str());
    o << buf;
  }
  return o.str();
}

template <class Cell>
std::string grid_csv(const Example2Result& r, Cell cell) {
  std::ostringstream o;
  o << "tau,eta,value,display\n";
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto [value, display] = cell(i, j);
      o << format_real(r.taus[i]) << ',' << format_real(r.etas[j]) << ',' << format_real(value) << ',' << display << '\n';
    }
  }
  return o.str();
}

}  // namespace

std::string example2_tables(const Example2Result& r) {
  std::ostringstream o;
  o << "Square well, shift -tau/2: maximal relative distances max |mu' - mu| / |mu + tau/2|\n";
  o << grid_table(r, [&](std::size_t i, std::size_t j) { return format_scientific(r.distances[i][j]); });
  o << "\nBounds eta / (1 - tau/2)\n";
  o << grid_table(r, [&](std::size_t i, std::size_t j) { return format_compact(r.bounds[i][j]); });
  o << "\nDiagnostics\n";
  for (std::size_t i = 0; i < 3; ++i) {
    o << "  contraction at shift -tau/2, t = " << tau_label(r.taus[i]) << ": " << format_real(r.contraction[i]) << '\n';
  }
  o << "  ||V U^{-1}|| / tau   = " << format_real(r.v_u_inv_ratio) << '\n';
  o << "  ||V U^{-2}|| / tau   = " << format_real(r.v_u2_inv_ratio) << '\n';
  o << "\nNotes\n";
  for (const auto& n : r.notes) o << "  - " << n << '\n';
  return o.str();
}

std::string example2_distances_csv(const Example2Result& r) {
  return grid_csv(r, [&](std::size_t i, std::size_t j) {
    return std::pair{r.distances[i][j], format_scientific(r.distances[i][j])};
  });
}

std::string example2_bounds_csv(const Example2Result& r) {
  return grid_csv(r, [&](std::size_t i, std::size_t j) {
    return std::pair{r.bounds[i][j], format_compact(r.bounds[i][j])};
  });
}

std::string example2_json(const Example2Result& r) {
  ojson cells = ojson::array();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      cells.push_back({{"tau", r.taus[i]},
                       {"eta", r.etas[j]},
                       {"max_relative_distance", r.distances[i][j]},
                       {"max_relative_distance_display", format_scientific(r.distances[i][j])},
                       {"bound", r.bounds[i][j]},
                       {"bound_display", format_compact(r.bounds[i][j])}});
    }
  }
  ojson contraction = ojson::array();
  for (std::size_t i = 0; i < 3; ++i) contraction.push_back({{"tau", r.taus[i]}, {"contraction", r.contraction[i]}});
  return dump(ojson{{"example", "example2"},
                    {"shift", "-tau/2"},
                    {"cells", cells},
                    {"contraction", contraction},
                    {"v_u_inv_over_tau", r.v_u_inv_ratio},
                    {"v_u2_inv_over_tau", r.v_u2_inv_ratio},
                    {"notes", r.notes}});
}

std::string example1_table(const Example1Result& r) {
  std::ostringstream o;
  o << "Harmonic model, N = " << r.grid_points << ", L = " << format_real(r.half_width) << '\n';
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-6s %-5s %-3s %-12s %-12s %-11s %-12s %-12s %-11s\n", "alpha", "beta", "n",
                "mu+ (disc)", "mu+ (exact)", "|error|", "mu- (disc)", "mu- (exact)", "|error|");
  o << buf;
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%-6.2f %-5.1f %-3d %-12.7f %-12.7f %-11.4e %-12.7f %-12.7f %-11.4e\n", row.alpha,
                  row.beta, row.level, row.computed_plus, row.exact_plus, row.error_plus, row.computed_minus,
                  row.exact_minus, row.error_minus);
    o << buf;
  }
  const auto& s = r.sensitivity;
  o << "\nSensitivity at alpha = " << format_real(s.alpha) << ", eps = " << format_scientific(s.epsilon, 1) << ", beta = 0, n = 0\n";
  o << "  relative change (discretized)   " << format_scientific(s.relative_change) << '\n';
  o << "  ratio / eps (discretized)       " << format_scientific(s.computed_ratio) << '\n';
  o << "  -(3/2) alpha / (1 - alpha^2)    " << format_scientific(s.exact_ratio) << '\n';
  o << "  bound eps / (1 - alpha)         " << format_scientific(s.bound) << '\n';
  o << "  factor (3/2) alpha / (1 + alpha) " << format_scientific(s.factor) << '\n';
  return o.str();
}

std::string example1_csv(const Example1Result& r) {
  std::ostringstream o;
  o << "alpha,beta,n,computed_plus,exact_plus,error_plus,residual_plus,computed_minus,exact_minus,error_minus,"
       "residual_minus\n";
  for (const auto& row : r.rows) {
    o << format_real(row.alpha) << ',' << format_real(row.beta) << ',' << row.level << ',' << format_real(row.computed_plus)
      << ',' << format_real(row.exact_plus) << ',' << format_real(row.error_plus) << ',' << format_real(row.residual_plus)
      << ',' << format_real(row.computed_minus) << ',' << format_real(row.exact_minus) << ','
      << format_real(row.error_minus) << ',' << format_real(row.residual_minus) << '\n';
  }
  return o.str();
}

std::string example1_json(const Example1Result& r) {
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"alpha", row.alpha},
                    {"beta", row.beta},
                    {"n", row.level},
                    {"computed_plus", row.computed_plus},
                    {"exact_plus", row.exact_plus},
                    {"error_plus", row.error_plus},
                    {"residual_plus", row.residual_plus},
                    {"computed_minus", row.computed_minus},
                    {"exact_minus", row.exact_minus},
                    {"error_minus", row.error_minus},
                    {"residual_minus", row.residual_minus}});
  }
  const auto& s = r.sensitivity;
  return dump(ojson{{"example", "example1"},
                    {"grid_points", r.grid_points},
                    {"half_width", r.half_width},
                    {"levels", rows},
                    {"sensitivity",
                     {{"alpha", s.alpha},
                      {"epsilon", s.epsilon},
                      {"relative_change", s.relative_change},
                      {"computed_ratio", s.computed_ratio},
                      {"exact_ratio", s.exact_ratio},
                      {"bound", s.bound},
                      {"factor", s.factor}}}});
}

// ---------------------------------------------------------------------------
// driver

namespace {

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output_path) write_file(*cfg.output_path, text);
  else out << text;
}

int run_reproduce(const RunConfig& cfg, std::ostream& out) {
  const bool json = cfg.format == OutputFormat::Report;
  std::vector<std::pair<std::string, std::string>> files;
  std::string primary;
  if (cfg.reproduce_target == "example2") {
    const Example2Result r = reproduce_example2();
    primary = json ? example2_json(r) : example2_tables(r);
    files = {{"example2_true_distances.csv", example2_distances_csv(r)},
             {"example2_bounds.csv", example2_bounds_csv(r)},
             {"example2_report.json", example2_json(r)},
             {"example2_tables.txt", example2_tables(r)}};
  } else if (cfg.reproduce_target == "example1") {
    const Example1Result r = reproduce_example1(cfg.grid_points.value_or(1000), cfg.half_width.value_or(12.0));
    primary = json ? example1_json(r) : example1_table(r);
    files = {{"example1_levels.csv", example1_csv(r)},
             {"example1_report.json", example1_json(r)},
             {"example1_table.txt", example1_table(r)}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "reproduce target must be example1 or example2");
  }
  if (cfg.output_path) {
    std::filesystem::create_directories(*cfg.output_path);
    for (const auto& [name, text] : files) write_file(*cfg.output_path / name, text);
  }
  out << primary;
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const bool json = cfg.format == OutputFormat::Report;
  if (cfg.command == Command::Reproduce) return run_reproduce(cfg, out);

  const ModelDescription model = resolve_model(cfg);
  switch (cfg.command) {
    case Command::Spectrum: {
      const SpectrumResult r = run_spectrum(model.spec, resolve_shift(cfg, model));
      emit(cfg, out, json ? spectrum_json(r, model) : spectrum_csv(r));
      if (!r.residuals_ok) {
        err << "error: pencil residual exceeds " << format_scientific(kPencilFailFactor, 1) << " x matrix scale\n";
        return kExitSolver;
      }
      return kExitOk;
    }
    case Command::Bounds: {
      const double eta = perturbation_strength(cfg, model);
      const BoundsResult r = run_bounds(model.spec, resolve_perturbation(cfg, model), resolve_shift(cfg, model), eta);
      emit(cfg, out, json ? bounds_json(r, model) : bounds_csv(r));
      return kExitOk;
    }
    case Command::Verify: {
      const double eta = perturbation_strength(cfg, model);
      const VerificationReport r = verify_bounds(model.spec, resolve_perturbation(cfg, model), resolve_shift(cfg, model));
      emit(cfg, out, json ? verification_json(r, model, eta) : verification_csv(r));
      return kExitOk;
    }
    case Command::Sweep: {
      double lo = 0.0, hi = 0.0;
      if (cfg.sweep_range) {
        std::tie(lo, hi) = *cfg.sweep_range;
      } else if (model.kind == ModelKind::SquareWell) {
        hi = 2.2;
      } else if (model.kind == ModelKind::Harmonic) {
        hi = 0.99;
      } else {
        hi = 1.0;
      }
      const SweepResult r = run_sweep(model.spec, sweep_direction(model), lo, hi, cfg.steps);
      emit(cfg, out, json ? sweep_json(r, model) : sweep_csv(r));
      if (r.critical_value) err << "critical value " << format_real(*r.critical_value) << '\n';
      return kExitOk;
    }
    case Command::Reproduce: break;
  }
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_status(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace kg
