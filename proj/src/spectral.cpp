#include "kg/spectral.hpp"

#include "kg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kg {

const char* to_string(SignType t) {
  switch (t) {
    case SignType::Positive: return "positive";
    case SignType::Negative: return "negative";
    case SignType::Neutral: return "neutral";
  }
  return "neutral";
}

const char* to_string(SolverPath p) { return p == SolverPath::Similarity ? "similarity" : "direct"; }

std::vector<double> SpectrumReport::real_parts() const {
  std::vector<double> out(static_cast<std::size_t>(eigenvalues.size()));
  for (Index i = 0; i < eigenvalues.size(); ++i) out[static_cast<std::size_t>(i)] = eigenvalues(i).real();
  return out;
}

double SpectrumReport::max_imaginary() const {
  double m = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) m = std::max(m, std::abs(eigenvalues(i).imag()));
  return m;
}

namespace {

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

/// (Jx, x) / |x|^2 for a complex vector; J swaps the two halves.
double j_ratio(const ComplexVector& x) {
  const Index n = x.size() / 2;
  const Complex jxx = x.head(n).dot(x.tail(n)) + x.tail(n).dot(x.head(n));
  const double nrm = x.squaredNorm();
  return nrm > 0.0 ? jxx.real() / nrm : 0.0;
}

SignType classify(double ratio) {
  if (std::abs(ratio) < kNeutralThreshold) return SignType::Neutral;
  return ratio > 0.0 ? SignType::Positive : SignType::Negative;
}

void sort_report(SpectrumReport& r) {
  std::vector<Index> order(static_cast<std::size_t>(r.eigenvalues.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return complex_less(r.eigenvalues(a), r.eigenvalues(b)); });
  ComplexVector vals(r.eigenvalues.size());
  std::vector<SignType> types(order.size());
  ComplexMatrix vecs(r.eigenvectors.rows(), r.eigenvectors.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    vals(static_cast<Index>(k)) = r.eigenvalues(order[k]);
    types[k] = r.sign_types[static_cast<std::size_t>(order[k])];
    if (r.has_vectors()) vecs.col(static_cast<Index>(k)) = r.eigenvectors.col(order[k]);
  }
  r.eigenvalues = std::move(vals);
  r.sign_types = std::move(types);
  if (r.has_vectors()) r.eigenvectors = std::move(vecs);
}

void compute_residual(SpectrumReport& r, const Matrix& h) {
  if (!r.has_vectors()) return;
  double worst = 0.0;
  const ComplexMatrix hx = h.cast<Complex>() * r.eigenvectors;
  for (Index k = 0; k < r.eigenvalues.size(); ++k) {
    const double res = (hx.col(k) - r.eigenvalues(k) * r.eigenvectors.col(k)).norm() /
                       (r.matrix_scale * r.eigenvectors.col(k).norm());
    worst = std::max(worst, res);
  }
  r.residual_max = worst;
}

void fill_orderings(SpectrumReport& r) {
  r.positive_ordered.clear();
  r.negative_ordered.clear();
  for (Index k = 0; k < r.eigenvalues.size(); ++k) {
    if (r.eigenvalues(k).imag() != 0.0) continue;
    const SignType t = r.sign_types[static_cast<std::size_t>(k)];
    if (t == SignType::Positive) r.positive_ordered.push_back(r.eigenvalues(k).real());
    if (t == SignType::Negative) r.negative_ordered.push_back(r.eigenvalues(k).real());
  }
  std::sort(r.positive_ordered.begin(), r.positive_ordered.end());
  std::sort(r.negative_ordered.begin(), r.negative_ordered.end(), std::greater<>());
}

DefectReport defect_check_impl(const Matrix& h, const SpectrumReport& report, bool assume_semisimple) {
  DefectReport out;
  const double scale = report.matrix_scale > 0.0 ? report.matrix_scale : spectral_norm_estimate(h);
  const double tol = kClusterTolerance * scale;

  // Neutral eigenvectors of real eigenvalues.
  if (report.has_vectors()) {
    for (Index k = 0; k < report.eigenvalues.size(); ++k) {
      if (report.eigenvalues(k).imag() != 0.0) continue;
      if (std::abs(j_ratio(report.eigenvectors.col(k))) < kNeutralThreshold) {
        out.defective = true;
        out.neutral_vector = true;
        out.eigenvalue = report.eigenvalues(k).real();
        out.witness = report.eigenvectors.col(k);
        break;
      }
    }
  }
  if (assume_semisimple) return out;

  // Multiplicity clusters among real eigenvalues.
  std::vector<double> reals;
  for (Index k = 0; k < report.eigenvalues.size(); ++k) {
    if (report.eigenvalues(k).imag() == 0.0) reals.push_back(report.eigenvalues(k).real());
  }
  std::sort(reals.begin(), reals.end());
  std::size_t start = 0;
  while (start < reals.size()) {
    std::size_t end = start + 1;
    while (end < reals.size() && reals[end] - reals[end - 1] <= tol) ++end;
    const int algebraic = static_cast<int>(end - start);
    if (algebraic >= 2) {
      const double lambda = std::accumulate(reals.begin() + static_cast<std::ptrdiff_t>(start),
                                            reals.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                            algebraic;
      Matrix shifted = h;
      shifted.diagonal().array() -= lambda;
      Eigen::BDCSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
      const Vector& sv = svd.singularValues();
      int geometric = 0;
      for (Index i = 0; i < sv.size(); ++i) geometric += sv(i) <= tol ? 1 : 0;
      if (geometric < algebraic) {
        out.defective = true;
        out.eigenvalue = lambda;
        out.algebraic_multiplicity = algebraic;
        out.geometric_multiplicity = geometric;
        out.witness = svd.matrixV().col(sv.size() - 1).cast<Complex>();
        out.neutral_vector = std::abs(j_ratio(out.witness)) < kNeutralThreshold;
        return out;
      }
    }
    start = end;
  }
  return out;
}

void finalize(SpectrumReport& r, const Matrix& h, const SpectrumOptions& opts) {
  sort_report(r);
  compute_residual(r, h);
  fill_orderings(r);
  if (r.is_real_spectrum) r.central_gap = central_gap(r, r.shift);
  if (opts.check_defects) {
    const DefectReport d = defect_check_impl(h, r, r.path == SolverPath::Similarity);
    r.defective = d.defective;
  }
}

}  // namespace

SpectrumReport direct_spectrum(const Matrix& hamiltonian, double shift, const SpectrumOptions& opts) {
  Eigen::EigenSolver<Matrix> es(hamiltonian, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "general eigensolver failed");

  SpectrumReport r;
  r.path = SolverPath::Direct;
  r.shift = shift;
  r.matrix_scale = spectral_norm_estimate(hamiltonian);
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = es.eigenvectors();
  const Index m = r.eigenvalues.size();

  // Merge near-coincident pairs: a perturbed Jordan block splits by O(sqrt(eps)).
  const double merge_tol = kJordanSplitTolerance * r.matrix_scale;
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return complex_less(r.eigenvalues(a), r.eigenvalues(b)); });
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (std::size_t a = 0; a < order.size(); ++a) {
    if (used[static_cast<std::size_t>(order[a])]) continue;
    std::vector<Index> group{order[a]};
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Index j = order[b];
      if (used[static_cast<std::size_t>(j)]) continue;
      if (r.eigenvalues(j).real() - r.eigenvalues(order[a]).real() > merge_tol) break;
      if (std::abs(r.eigenvalues(j) - r.eigenvalues(order[a])) <= merge_tol) group.push_back(j);
    }
    if (group.size() < 2) continue;
    Complex mean{0.0, 0.0};
    for (Index j : group) mean += r.eigenvalues(j);
    mean /= static_cast<double>(group.size());
    if (std::abs(mean.imag()) > kImaginaryTolerance * r.matrix_scale) continue;
    const double lambda = mean.real();
    Matrix shifted = hamiltonian;
    shifted.diagonal().array() -= lambda;
    Eigen::BDCSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    const Index last = svd.singularValues().size() - 1;
    int k = 0;
    for (Index j : group) {
      used[static_cast<std::size_t>(j)] = true;
      r.eigenvalues(j) = Complex(lambda, 0.0);
      // Null vectors first; a defective cluster repeats its last null vector.
      const Index col = std::max<Index>(last - k, 0);
      const bool in_null = svd.singularValues()(col) <= kClusterTolerance * r.matrix_scale;
      r.eigenvectors.col(j) = svd.matrixV().col(in_null ? col : last).cast<Complex>();
      ++k;
    }
  }

  double max_imag = 0.0;
  for (Index k = 0; k < m; ++k) {
    if (std::abs(r.eigenvalues(k).imag()) <= kImaginaryTolerance * r.matrix_scale) {
      r.eigenvalues(k) = Complex(r.eigenvalues(k).real(), 0.0);
    }
    max_imag = std::max(max_imag, std::abs(r.eigenvalues(k).imag()));
    r.eigenvectors.col(k).normalize();
  }
  r.is_real_spectrum = max_imag == 0.0;
  r.sign_types.resize(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    r.sign_types[static_cast<std::size_t>(k)] =
        r.eigenvalues(k).imag() != 0.0 ? SignType::Neutral : classify(j_ratio(r.eigenvectors.col(k)));
  }
  finalize(r, hamiltonian, opts);
  if (!opts.compute_vectors) r.eigenvectors.resize(0, 0);
  return r;
}

SpectrumReport gram_spectrum(const Matrix& gram, double shift, const SpectrumOptions& opts) {
  const Index n2 = gram.rows();
  if (n2 % 2 != 0 || gram.cols() != n2) throw Error(ErrorCode::DimensionMismatch, "gram must be square of even order");
  const Index n = n2 / 2;
  const Matrix h = apply_swap(gram);

  Matrix p = gram;
  p.topRightCorner(n, n).diagonal().array() -= shift;
  p.bottomLeftCorner(n, n).diagonal().array() -= shift;
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() != Eigen::Success) return direct_spectrum(h, shift, opts);
  const Matrix l = llt.matrixL();
  if (l.diagonal().minCoeff() <= 1e-10 * l.diagonal().maxCoeff()) return direct_spectrum(h, shift, opts);

  // H - mu = J L L^T is similar to the symmetric L^T J L.
  Matrix m = l.transpose().triangularView<Eigen::Upper>() * apply_swap(l);
  m = symmetric_part(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      m, opts.compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "symmetric eigensolver failed");

  SpectrumReport r;
  r.path = SolverPath::Similarity;
  r.shift = shift;
  r.matrix_scale = spectral_norm_estimate(h);
  const Vector& theta = es.eigenvalues();
  r.eigenvalues = (theta.array() + shift).cast<Complex>().matrix();
  r.sign_types.resize(static_cast<std::size_t>(n2));
  if (opts.compute_vectors) {
    Matrix x = l.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    x.colwise().normalize();
    r.eigenvectors = x.cast<Complex>();
    for (Index k = 0; k < n2; ++k) r.sign_types[static_cast<std::size_t>(k)] = classify(j_ratio(r.eigenvectors.col(k)));
  } else {
    // (Jx, x) = 1 / theta for x = L^{-T} q with |q| = 1.
    for (Index k = 0; k < n2; ++k) {
      r.sign_types[static_cast<std::size_t>(k)] = theta(k) > 0.0 ? SignType::Positive : SignType::Negative;
    }
  }
  r.is_real_spectrum = true;
  finalize(r, h, opts);
  return r;
}

SpectrumReport eigen_spectrum(const KleinGordonSystem& system, const SpectrumOptions& opts) {
  if (system.contraction < 1.0 - kSimilarityMargin) return gram_spectrum(system.gram, system.shift, opts);
  return direct_spectrum(system.hamiltonian, system.shift, opts);
}

ComplexVector direct_eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "general eigensolver failed");
  ComplexVector vals = es.eigenvalues();
  std::sort(vals.data(), vals.data() + vals.size(), complex_less);
  return vals;
}

SignOperator sign_operator(const KleinGordonSystem& system) {
  if (!(system.contraction < 1.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, "G - mu J is not positive definite (contraction >= 1)");
  }
  Eigen::LLT<Matrix> llt(system.shifted_gram());
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "G - mu J is not positive definite");
  const Matrix l = llt.matrixL();
  const Matrix m = symmetric_part(l.transpose() * apply_swap(l));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector signs = es.eigenvalues().unaryExpr([](double t) { return t > 0.0 ? 1.0 : -1.0; });
  const Matrix sign_m = es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().transpose();
  SignOperator s;
  s.j1 = l.transpose().triangularView<Eigen::Upper>().solve(Matrix(sign_m * l.transpose()));
  s.norm_j1 = spectral_norm(s.j1);
  return s;
}

Interval central_gap(const SpectrumReport& report, double shift) {
  if (!report.is_real_spectrum) throw Error(ErrorCode::NonRealSpectrum, "central gap needs a real spectrum");
  Interval gap;
  for (Index k = 0; k < report.eigenvalues.size(); ++k) {
    const double s = report.eigenvalues(k).real();
    if (s < shift) gap.lower = std::max(gap.lower, s);
    else if (s > shift) gap.upper = std::min(gap.upper, s);
    else return Interval{shift, shift};
  }
  return gap;
}

double relative_distance(double lambda, std::span<const double> spectrum) {
  if (spectrum.empty()) throw Error(ErrorCode::EmptySpectrum, "relative distance to an empty set");
  double best = std::numeric_limits<double>::infinity();
  for (double s : spectrum) {
    if (s == 0.0) throw Error(ErrorCode::ZeroInSpectrum, "relative distance undefined when 0 is in the spectrum");
    best = std::min(best, std::abs((s - lambda) / s));
  }
  return best;
}

double pencil_residual(const ModelSpec& spec, Complex lambda) {
  const Index n = spec.order();
  const Matrix& v = spec.v().matrix();
  if (lambda.imag() == 0.0) {
    Matrix shifted = -v;
    shifted.diagonal().array() += lambda.real();
    const Matrix q = symmetric_part(shifted * shifted - spec.u_squared().matrix());
    if (n <= kPencilDenseOrder) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().minCoeff();
    }
    // Inverse iteration; every iterate gives |Q x| >= sigma_min, so the
    // result never understates the residual.
    const Eigen::PartialPivLU<Matrix> lu(q);
    Vector x = Vector::LinSpaced(n, 1.0, 2.0).normalized();
    double best = (q * x).norm();
    for (int it = 0; it < 12; ++it) {
      Vector y = lu.solve(x);
      const double ny = y.norm();
      if (!std::isfinite(ny) || ny == 0.0) break;
      x = y / ny;
      best = std::min(best, (q * x).norm());
    }
    return best;
  }
  ComplexMatrix shifted = -v.cast<Complex>();
  shifted.diagonal().array() += lambda;
  const ComplexMatrix q = shifted * shifted - spec.u_squared().matrix().cast<Complex>();
  if (n <= 16) {
    Eigen::JacobiSVD<ComplexMatrix> svd(q);
    return svd.singularValues().minCoeff();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(q);
  return svd.singularValues().minCoeff();
}

double pencil_scale(const ModelSpec& spec, Complex lambda) {
  Eigen::SelfAdjointEigenSolver<Matrix> u2(spec.u_squared().matrix(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> v(spec.v().matrix(), Eigen::EigenvaluesOnly);
  const double vn = v.eigenvalues().cwiseAbs().maxCoeff();
  return u2.eigenvalues().cwiseAbs().maxCoeff() + std::norm(lambda) + vn * vn;
}

DefectReport defect_check(const Matrix& hamiltonian, const SpectrumReport& report) {
  return defect_check_impl(hamiltonian, report, false);
}

DefectReport defect_check(const KleinGordonSystem& system, const SpectrumReport& report) {
  return defect_check_impl(system.hamiltonian, report, false);
}

}  // namespace kg
