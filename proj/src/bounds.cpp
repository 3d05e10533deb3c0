#include "kg/bounds.hpp"

#include "kg/error.hpp"

#include <algorithm>
#include <cmath>

namespace kg {

namespace {

constexpr double kSignTolerance = 1e-10;
constexpr double kCheckSlack = 1e-10;

double symmetric_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void require_contraction(double b) {
  if (!(b < 1.0)) throw Error(ErrorCode::ContractionNotLessThanOne, "contraction b = " + std::to_string(b));
}

/// G' - G for V -> V + dV: [[0, X^T], [X, 0]] with X = U^{1/2} dV U^{-1/2}.
Matrix gram_increment(const KleinGordonSystem& sys, const Matrix& delta_v) {
  const Index n = sys.n;
  const Matrix x = sys.u_quarter * delta_v * sys.u_inv_quarter;
  Matrix dg = Matrix::Zero(2 * n, 2 * n);
  dg.topRightCorner(n, n) = x.transpose();
  dg.bottomLeftCorner(n, n) = x;
  return dg;
}

}  // namespace

const char* to_string(SignCondition s) {
  return s == SignCondition::NegativeSemidefinite ? "negative" : "positive";
}

const char* to_string(GapCase c) {
  switch (c) {
    case GapCase::PositiveGap: return "positive-gap";
    case GapCase::Straddling: return "straddling";
    case GapCase::NegativeGap: return "negative-gap";
  }
  return "straddling";
}

double KappaPair::max_abs() const { return std::max(std::abs(minus), std::abs(plus)); }

PerturbationSpec analyze_perturbation(const KleinGordonSystem& system, const SymmetricMatrix& delta_v) {
  if (delta_v.order() != system.n) throw Error(ErrorCode::DimensionMismatch, "perturbation order differs from model order");
  PerturbationSpec p;
  p.delta_v = delta_v;
  p.delta_a = delta_v.matrix() * system.u_inv_sqrt;
  p.c = spectral_norm(p.delta_a);
  p.norm_delta_v = system.n > 0 ? symmetric_norm(delta_v.matrix()) : 0.0;

  Matrix w = system.spec.v().matrix();
  w.diagonal().array() -= system.shift;
  Eigen::SelfAdjointEigenSolver<Matrix> ew(w, Eigen::EigenvaluesOnly);
  const double w_min = ew.eigenvalues().cwiseAbs().minCoeff();
  const double w_max = ew.eigenvalues().cwiseAbs().maxCoeff();
  if (w_min > 1e-12 * std::max(w_max, 1.0)) {
    p.nu = spectral_norm(Matrix(w.partialPivLu().solve(delta_v.matrix())));
  }

  const Matrix& a = system.a_matrix;
  const Matrix s = symmetric_part(p.delta_a.transpose() * a + a.transpose() * p.delta_a);
  const double tol = kSignTolerance * system.contraction * p.c;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  p.disjoint = std::max(std::abs(lo), std::abs(hi)) <= std::max(tol, 1e-300);
  if (hi <= tol) p.sign_condition = SignCondition::NegativeSemidefinite;
  else if (lo >= -tol) p.sign_condition = SignCondition::PositiveSemidefinite;
  return p;
}

double gap_bound(const KleinGordonSystem& system) {
  require_contraction(system.contraction);
  return (1.0 - system.contraction) * system.u_min_eigenvalue;
}

KappaBundle perturbation_constants(const KleinGordonSystem& system, const PerturbationSpec& pert) {
  const double b = system.contraction;
  require_contraction(b);
  const double c = pert.c;
  KappaBundle k;
  k.b = b;
  k.c = c;
  k.general = {c / (1.0 - b), c / (1.0 - b) < 1.0};
  k.sum = {c + b, c + b < 1.0};
  const double np = pert.norm_delta_v / system.u_min_eigenvalue / (1.0 - b);
  k.norm_product = {np, np < 1.0};
  if (pert.nu) {
    const double v = *pert.nu * b / (1.0 - b);
    k.relative = KappaEntry{v, v < 1.0};
  }
  const double root = std::sqrt(1.0 - b * b);
  if (pert.disjoint) k.disjoint = KappaEntry{c / root, b * b + c * c < 1.0};
  if (pert.sign_condition) {
    KappaPair sp;
    if (*pert.sign_condition == SignCondition::NegativeSemidefinite) {
      sp.minus = -c / root;
      sp.plus = c / (1.0 - b);
    } else {
      sp.minus = -c / (1.0 - b);
      sp.plus = c / root;
    }
    sp.valid = sp.minus > -1.0;
    k.signed_pair = sp;
  }

  const BlockStructure bs = block_structure_analysis(system.a_matrix, pert.delta_a);
  k.structured = {bs.kappa_minus, bs.kappa_plus, bs.kappa_minus > -1.0};

  const auto [km, kp] = exact_kappa_pm(SymmetricMatrix(symmetric_part(system.shifted_gram())),
                                       SymmetricMatrix(gram_increment(system, pert.delta_v.matrix())));
  k.exact = {km, kp, km > -1.0};

  if (k.exact.valid) {
    const Rescaling r = rescale_kappa(km, kp);
    k.kappa0_hat = r.kappa0_hat;
    k.kappa_prime_hat = r.kappa_prime_hat;
    k.rescaled_valid = true;
    k.rescaled_source = "exact";
  } else if (k.structured.valid) {
    const Rescaling r = rescale_kappa(k.structured.minus, k.structured.plus);
    k.kappa0_hat = r.kappa0_hat;
    k.kappa_prime_hat = r.kappa_prime_hat;
    k.rescaled_valid = true;
    k.rescaled_source = "structured";
  }
  return k;
}

std::pair<double, double> exact_kappa_pm(const SymmetricMatrix& g, const SymmetricMatrix& delta_g) {
  if (g.order() != delta_g.order()) throw Error(ErrorCode::DimensionMismatch, "g and delta_g differ in order");
  Eigen::LLT<Matrix> llt(g.matrix());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "g is not positive definite");
  const auto l = llt.matrixL();
  // L^{-1} dG L^{-T}
  Matrix c = l.solve(delta_g.matrix());
  c = l.solve(Matrix(c.transpose()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(c), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

Rescaling rescale_kappa(double kappa_minus, double kappa_plus) {
  if (!(kappa_minus > -1.0)) {
    throw Error(ErrorCode::KappaMinusNotAboveMinusOne, "kappa- = " + std::to_string(kappa_minus));
  }
  if (kappa_minus > kappa_plus) throw Error(ErrorCode::InvalidArgument, "kappa- exceeds kappa+");
  return {(kappa_plus + kappa_minus) / 2.0, (kappa_plus - kappa_minus) / (2.0 + kappa_plus + kappa_minus)};
}

GapInclusion gap_inclusion(const Interval& gap, double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw Error(ErrorCode::KappaOutOfRange, "kappa = " + std::to_string(kappa));
  if (gap.empty()) throw Error(ErrorCode::InvalidArgument, "gap is empty");
  GapInclusion g;
  g.original = gap;
  if (gap.lower >= 0.0) {
    g.case_tag = GapCase::PositiveGap;
    g.predicted = {(1.0 + kappa) * gap.lower, (1.0 - kappa) * gap.upper};
  } else if (gap.upper <= 0.0) {
    g.case_tag = GapCase::NegativeGap;
    g.predicted = {(1.0 - kappa) * gap.lower, (1.0 + kappa) * gap.upper};
  } else {
    g.case_tag = GapCase::Straddling;
    g.predicted = {(1.0 - kappa) * gap.lower, (1.0 - kappa) * gap.upper};
  }
  return g;
}

Interval improved_inclusion(const Interval& gap, double kappa_minus, double kappa_plus) {
  const Rescaling r = rescale_kappa(kappa_minus, kappa_plus);
  const double stretch = 1.0 + r.kappa0_hat;
  return gap_inclusion(Interval{stretch * gap.lower, stretch * gap.upper}, r.kappa_prime_hat).predicted;
}

Interval norm_bound_interval(const Interval& gap, double a, double norm_j1) {
  if (a < 0.0) throw Error(ErrorCode::InvalidArgument, "perturbation norm must be nonnegative");
  if (norm_j1 < 1.0 - 1e-12) throw Error(ErrorCode::InvalidArgument, "||J1|| is at least 1");
  const double shrink = a * norm_j1;
  return {gap.lower + shrink, gap.upper - shrink};
}

double t_bound(double a, double norm_b) { return 0.5 * (a + std::sqrt(a * a + 4.0 * norm_b * norm_b)); }

BlockStructure block_structure_analysis(const Matrix& a_matrix, const Matrix& delta_a) {
  if (a_matrix.rows() != delta_a.rows() || a_matrix.cols() != delta_a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "A and dA differ in shape");
  }
  const double b = spectral_norm(a_matrix);
  require_contraction(b);
  const Index n = a_matrix.cols();
  const Matrix defect = Matrix::Identity(n, n) - a_matrix.transpose() * a_matrix;
  const Matrix s = SpdSpectrum(SymmetricMatrix(symmetric_part(defect))).power(-0.5);
  const Matrix sym = delta_a.transpose() * a_matrix + a_matrix.transpose() * delta_a;
  const Matrix m11 = symmetric_part(-(s * sym * s));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m11, Eigen::EigenvaluesOnly);

  BlockStructure out;
  out.a_minus = es.eigenvalues().minCoeff();
  out.a_plus = es.eigenvalues().maxCoeff();
  out.norm_b = spectral_norm(delta_a * s);
  out.kappa_minus = -t_bound(-out.a_minus, out.norm_b);
  out.kappa_plus = t_bound(out.a_plus, out.norm_b);
  return out;
}

std::vector<EigenInterval> eigenvalue_interval_bounds(const SpectrumReport& report, double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw Error(ErrorCode::KappaOutOfRange, "kappa = " + std::to_string(kappa));
  std::vector<EigenInterval> out;
  for (Index k = 0; k < report.eigenvalues.size(); ++k) {
    if (report.eigenvalues(k).imag() != 0.0) continue;
    const double lambda = report.eigenvalues(k).real();
    const double d = std::abs(lambda - report.shift);
    out.push_back({lambda, report.sign_types[static_cast<std::size_t>(k)], lambda - kappa * d, lambda + kappa * d});
  }
  return out;
}

std::vector<std::pair<double, double>> pair_eigenvalues(const SpectrumReport& base, const SpectrumReport& perturbed) {
  std::vector<std::pair<double, double>> out;
  const auto total = static_cast<std::size_t>(base.eigenvalues.size());
  const bool typed = base.is_real_spectrum && perturbed.is_real_spectrum &&
                     base.positive_ordered.size() == perturbed.positive_ordered.size() &&
                     base.negative_ordered.size() == perturbed.negative_ordered.size() &&
                     base.positive_ordered.size() + base.negative_ordered.size() == total;
  if (typed) {
    for (std::size_t k = base.negative_ordered.size(); k-- > 0;) {
      out.emplace_back(base.negative_ordered[k], perturbed.negative_ordered[k]);
    }
    for (std::size_t k = 0; k < base.positive_ordered.size(); ++k) {
      out.emplace_back(base.positive_ordered[k], perturbed.positive_ordered[k]);
    }
    return out;
  }
  std::vector<double> a = base.real_parts();
  std::vector<double> b = perturbed.real_parts();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) out.emplace_back(a[k], b[k]);
  return out;
}

bool VerificationReport::all_applicable_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return !c.applicable || c.pass; });
}

VerificationReport verify_bounds(const ModelSpec& spec, const SymmetricMatrix& delta_v, double shift) {
  if (delta_v.order() != spec.order()) throw Error(ErrorCode::DimensionMismatch, "perturbation order differs from model order");
  const UnitRoots roots = unit_roots(spec.u_squared());
  const KleinGordonSystem base = assemble_system(spec, shift, roots);
  const ModelSpec perturbed_spec =
      spec.with_potential(SymmetricMatrix(spec.v().matrix() + delta_v.matrix()), spec.label() + "+dV");
  const KleinGordonSystem perturbed = assemble_system(perturbed_spec, shift, roots);

  SpectrumOptions opts;
  opts.compute_vectors = false;
  opts.check_defects = false;
  const SpectrumReport r0 = eigen_spectrum(base, opts);
  const SpectrumReport r1 = eigen_spectrum(perturbed, opts);

  VerificationReport rep;
  rep.shift = shift;
  rep.contraction = base.contraction;
  rep.contraction_perturbed = perturbed.contraction;
  rep.perturbed_real = r1.is_real_spectrum;
  rep.base_path = r0.path;
  rep.perturbed_path = r1.path;

  std::vector<double> signed_dev;
  for (const auto& [l0, l1] : pair_eigenvalues(r0, r1)) {
    const double denom = std::abs(l0 - shift);
    VerificationRow row{l0, l1, std::abs(l1 - l0) / denom};
    rep.max_deviation = std::max(rep.max_deviation, row.relative_deviation);
    signed_dev.push_back((l1 - l0) / (l0 - shift));
    rep.rows.push_back(row);
  }

  if (!(base.contraction < 1.0)) return rep;
  const PerturbationSpec pert = analyze_perturbation(base, delta_v);
  const KappaBundle k = perturbation_constants(base, pert);
  rep.bundle = k;

  auto symmetric_check = [&](const std::string& name, const KappaEntry& e) {
    rep.checks.push_back({name, e.value, e.valid, rep.max_deviation <= e.value + kCheckSlack});
  };
  auto pair_check = [&](const std::string& name, const KappaPair& p) {
    const bool ok = std::all_of(signed_dev.begin(), signed_dev.end(), [&](double r) {
      return r >= p.minus - kCheckSlack && r <= p.plus + kCheckSlack;
    });
    rep.checks.push_back({name, p.max_abs(), p.valid, ok});
  };

  symmetric_check("kappa_general", k.general);
  symmetric_check("kappa_sum", k.sum);
  symmetric_check("kappa_norm_product", k.norm_product);
  if (k.relative) symmetric_check("kappa_relative", *k.relative);
  if (k.disjoint) symmetric_check("kappa_disjoint", *k.disjoint);
  if (k.signed_pair) pair_check("kappa_signed", *k.signed_pair);
  pair_check("kappa_structured", k.structured);
  pair_check("kappa_exact", k.exact);
  if (k.rescaled_valid) {
    const bool ok = std::all_of(signed_dev.begin(), signed_dev.end(), [&](double r) {
      return std::abs(r - k.kappa0_hat) <= k.kappa_prime_hat * (1.0 + k.kappa0_hat) + kCheckSlack;
    });
    rep.checks.push_back({"kappa_rescaled", k.kappa_prime_hat, true, ok});
  }
  return rep;
}

}  // namespace kg
