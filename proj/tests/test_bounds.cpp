#include "kg/bounds.hpp"
#include "kg/error.hpp"
#include "kg/models.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace kg;

namespace {

ModelSpec well(double tau) { return square_well_model({tau, std::nullopt}); }

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

/// Perturbed spectrum of H' relative to the shift.
std::vector<double> shifted_spectrum(const ModelSpec& spec, const SymmetricMatrix& dv, double shift) {
  const ModelSpec p = spec.with_potential(SymmetricMatrix(spec.v().matrix() + dv.matrix()));
  const ComplexVector ev = direct_eigenvalues(assemble_system(p, shift).hamiltonian);
  std::vector<double> out;
  for (Index k = 0; k < ev.size(); ++k) out.push_back(ev(k).real() - shift);
  return out;
}

}  // namespace

TEST_CASE("perturbation characterization on the square well") {
  const KleinGordonSystem s0 = assemble_system(well(0.0), 0.0);
  const PerturbationSpec p = analyze_perturbation(s0, square_well_perturbation(0.001));
  CHECK(p.c == doctest::Approx(0.001 * std::sqrt(2.0 / 3.0)).epsilon(1e-10));
  CHECK(p.norm_delta_v == doctest::Approx(0.001));
  Eigen::JacobiSVD<Matrix> svd(p.delta_a);
  CHECK(std::abs(p.c - svd.singularValues()(0)) <= 1e-10);
  CHECK(p.disjoint);  // A = 0

  const KleinGordonSystem s1 = assemble_system(well(1.0), -0.5);
  const PerturbationSpec zero = analyze_perturbation(s1, square_well_perturbation(0.0));
  const KappaBundle k0 = perturbation_constants(s1, zero);
  CHECK(k0.general.value == 0.0);
  CHECK(k0.norm_product.value == 0.0);
  CHECK(k0.exact.minus == doctest::Approx(0.0));
  CHECK(k0.exact.plus == doctest::Approx(0.0));
}

TEST_CASE("kappa constants reproduce the bound table") {
  const KleinGordonSystem s1 = assemble_system(well(1.0), -0.5);
  const KappaBundle k = perturbation_constants(s1, analyze_perturbation(s1, square_well_perturbation(0.1)));
  CHECK(k.b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k.norm_product.value == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(k.general.value == doctest::Approx(0.1 * std::sqrt(2.0 / 3.0) / 0.5).epsilon(1e-10));
  CHECK(k.exact.max_abs() <= 0.2);
  CHECK(k.exact.max_abs() <= k.general.value + 1e-12);
  CHECK(k.structured.minus <= k.exact.minus + 1e-12);
  CHECK(k.structured.plus >= k.exact.plus - 1e-12);

  const KleinGordonSystem s17 = assemble_system(well(1.7), -0.85);
  const KappaBundle k17 = perturbation_constants(s17, analyze_perturbation(s17, square_well_perturbation(0.001)));
  CHECK(k17.norm_product.value == doctest::Approx(0.001 / 0.15).epsilon(1e-10));

  // c scaled to 0.1 at b = 1/2 gives c / (1 - b) = 0.2.
  const SymmetricMatrix dv(square_well_perturbation(0.1).matrix() / std::sqrt(2.0 / 3.0));
  const KappaBundle kc = perturbation_constants(s1, analyze_perturbation(s1, dv));
  CHECK(kc.c == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(kc.general.value == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("constants collapse at b = 0") {
  const ModelSpec free(SymmetricMatrix(diag({2.0, 3.0, 5.0})), SymmetricMatrix::zero(3));
  const KleinGordonSystem sys = assemble_system(free, 0.0);
  const KappaBundle k = perturbation_constants(sys, analyze_perturbation(sys, random_perturbation(3, 0.05, 9)));
  CHECK(k.general.value == doctest::Approx(k.c).epsilon(1e-14));
  CHECK(k.sum.value == doctest::Approx(k.c).epsilon(1e-14));
  REQUIRE(k.disjoint);
  CHECK(k.disjoint->value == doctest::Approx(k.c).epsilon(1e-14));
}

TEST_CASE("exact kappa") {
  SplitMix64 rng(21);
  const Matrix g = test::random_spd(rng, 5);
  const auto [z0, z1] = exact_kappa_pm(SymmetricMatrix(g), SymmetricMatrix::zero(5));
  CHECK(z0 == doctest::Approx(0.0));
  CHECK(z1 == doctest::Approx(0.0));
  const auto [p0, p1] = exact_kappa_pm(SymmetricMatrix(g), SymmetricMatrix(0.3 * g));
  CHECK(p0 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p1 == doctest::Approx(0.3).epsilon(1e-12));

  // Oracle: generalized eigenproblem through g^{-1/2}.
  const Matrix dg = test::random_symmetric(rng, 5);
  const Matrix gi = sqrt_spd(SymmetricMatrix(g)).matrix().inverse();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(gi * dg * gi), Eigen::EigenvaluesOnly);
  const auto [m0, m1] = exact_kappa_pm(SymmetricMatrix(g), SymmetricMatrix(dg));
  CHECK(m0 == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
  CHECK(m1 == doctest::Approx(es.eigenvalues()(4)).epsilon(1e-10));

  CHECK_THROWS_AS(exact_kappa_pm(SymmetricMatrix(-g), SymmetricMatrix(dg)), Error);
}

TEST_CASE("rescale_kappa") {
  const Rescaling s = rescale_kappa(-0.4, 0.4);
  CHECK(s.kappa0_hat == 0.0);
  CHECK(s.kappa_prime_hat == doctest::Approx(0.4));
  const Rescaling a = rescale_kappa(0.0, 1.0);
  CHECK(a.kappa0_hat == doctest::Approx(0.5));
  CHECK(a.kappa_prime_hat == doctest::Approx(1.0 / 3.0));
  const Rescaling big = rescale_kappa(-0.9, 100.0);
  CHECK(big.kappa_prime_hat == doctest::Approx(100.9 / 101.1));
  CHECK(big.kappa_prime_hat < 1.0);
  CHECK_THROWS_AS(rescale_kappa(-1.0, 0.5), Error);
  try {
    rescale_kappa(-1.2, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KappaMinusNotAboveMinusOne);
  }
}

TEST_CASE("gap inclusion cases") {
  const GapInclusion s = gap_inclusion({-1.0, 1.0}, 0.2);
  CHECK(s.case_tag == GapCase::Straddling);
  CHECK(s.predicted.lower == doctest::Approx(-0.8));
  CHECK(s.predicted.upper == doctest::Approx(0.8));
  const GapInclusion p = gap_inclusion({2.0, 4.0}, 0.25);
  CHECK(p.case_tag == GapCase::PositiveGap);
  CHECK(p.predicted.lower == doctest::Approx(2.5));
  CHECK(p.predicted.upper == doctest::Approx(3.0));
  const GapInclusion n = gap_inclusion({-4.0, -2.0}, 0.25);
  CHECK(n.case_tag == GapCase::NegativeGap);
  CHECK(n.predicted.lower == doctest::Approx(-3.0));
  CHECK(n.predicted.upper == doctest::Approx(-2.5));
  CHECK(gap_inclusion({1.0, 1.2}, 0.5).predicted.empty());
  CHECK_THROWS_AS(gap_inclusion({-1.0, 1.0}, 1.0), Error);
  CHECK_THROWS_AS(gap_inclusion({-1.0, 1.0}, -0.1), Error);
}

TEST_CASE("improved inclusion") {
  const Interval same = improved_inclusion({-1.0, 1.0}, 0.3, 0.3);
  CHECK(same.lower == doctest::Approx(-1.3));
  CHECK(same.upper == doctest::Approx(1.3));
  const Interval sym = improved_inclusion({-1.0, 1.0}, -0.3, 0.3);
  const GapInclusion plain = gap_inclusion({-1.0, 1.0}, 0.3);
  CHECK(sym.lower == doctest::Approx(plain.predicted.lower));
  CHECK(sym.upper == doctest::Approx(plain.predicted.upper));
  // A nonnegative perturbation cannot shrink a straddling gap, and nothing more is certified.
  const Interval one_sided = improved_inclusion({-1.0, 1.0}, 0.0, 0.5);
  CHECK(one_sided.lower == doctest::Approx(-1.0));
  CHECK(one_sided.upper == doctest::Approx(1.0));
  const Interval positive = improved_inclusion({2.0, 4.0}, 0.1, 0.3);
  const Rescaling r = rescale_kappa(0.1, 0.3);
  CHECK(positive.lower == doctest::Approx((1 + r.kappa0_hat) * (1 + r.kappa_prime_hat) * 2.0));
  CHECK(positive.upper == doctest::Approx((1 + r.kappa0_hat) * (1 - r.kappa_prime_hat) * 4.0));
}

TEST_CASE("improved inclusion excludes the perturbed spectrum") {
  // dV >= 0 on a well with b = 0 gives a one-sided form perturbation.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const test::RandomCase rc = test::random_case(seed, 6, 0.6);
    const KleinGordonSystem sys = assemble_system(rc.spec, rc.shift);
    const SymmetricMatrix dv = test::random_delta(seed, rc.spec, 0.15);
    const PerturbationSpec pert = analyze_perturbation(sys, dv);
    const KappaBundle k = perturbation_constants(sys, pert);
    REQUIRE(k.exact.valid);
    SpectrumOptions o;
    o.compute_vectors = false;
    const Interval gap = central_gap(eigen_spectrum(sys, o), rc.shift);
    const Interval rel{gap.lower - rc.shift, gap.upper - rc.shift};
    const Interval imp = improved_inclusion(rel, k.exact.minus, k.exact.plus);
    // The endpoints can be attained, so allow rounding there.
    const Interval inner{imp.lower + 1e-10, imp.upper - 1e-10};
    for (double s : shifted_spectrum(rc.spec, dv, rc.shift)) CHECK_FALSE(inner.contains(s));
  }
}

TEST_CASE("norm bound interval") {
  const Interval g{10.0, 20.0};
  const Interval same = norm_bound_interval(g, 0.0, 1.0);
  CHECK(same.lower == 10.0);
  CHECK(same.upper == 20.0);
  const Interval r = norm_bound_interval(g, 1.0, 2.0);
  CHECK(r.lower == 12.0);
  CHECK(r.upper == 18.0);
  CHECK_THROWS_AS(norm_bound_interval(g, -1.0, 1.0), Error);

  // dV = diag(0.1, 0) on tau = 1: the uniform bound holds for H'.
  const ModelSpec s = well(1.0);
  const KleinGordonSystem sys = assemble_system(s, -0.5);
  const SymmetricMatrix dv(diag({0.1, 0.0}));
  const ModelSpec p = s.with_potential(SymmetricMatrix(s.v().matrix() + dv.matrix()));
  const double a = spectral_norm(assemble_system(p, -0.5).hamiltonian - sys.hamiltonian);
  const Interval gap = central_gap(eigen_spectrum(sys), -0.5);
  const Interval u = norm_bound_interval(gap, a, sign_operator(sys).norm_j1);
  CHECK_FALSE(u.empty());
  for (double x : shifted_spectrum(s, dv, 0.0)) CHECK_FALSE(u.contains(x));
}

TEST_CASE("block structure") {
  const Matrix a = 0.4 * Matrix::Identity(3, 3);
  const BlockStructure zero = block_structure_analysis(a, Matrix::Zero(3, 3));
  CHECK(zero.a_minus == 0.0);
  CHECK(zero.a_plus == 0.0);
  CHECK(zero.norm_b == 0.0);

  // Disjoint supports: the (1,1) block vanishes.
  const Matrix ad = diag({0.5, 0.0, 0.3});
  const Matrix dd = diag({0.0, 0.2, 0.0});
  const BlockStructure d = block_structure_analysis(ad, dd);
  CHECK(std::abs(d.a_minus) <= 1e-14);
  CHECK(std::abs(d.a_plus) <= 1e-14);
  const double b = 0.5;
  CHECK(d.norm_b == doctest::Approx(0.2));  // dA S acts on the null space of A
  CHECK(d.norm_b <= 0.2 / std::sqrt(1 - b * b) + 1e-14);
  CHECK(d.kappa_plus == doctest::Approx(d.norm_b));

  SplitMix64 rng(13);
  Matrix ar = test::random_matrix(rng, 4, 4);
  ar *= 0.5 / spectral_norm(ar);
  const Matrix dr = 0.1 * test::random_matrix(rng, 4, 4);
  const double nda = spectral_norm(dr);
  CHECK(t_bound(2 * 0.5 * nda / (1 - 0.25), nda / std::sqrt(1 - 0.25)) >= nda / (1 - 0.5) - 1e-12);
  CHECK(t_bound(0.0, 0.0) == 0.0);
  CHECK(t_bound(1.0, 0.0) == 1.0);
  CHECK(t_bound(0.0, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("eigenvalue intervals") {
  const KleinGordonSystem s0 = assemble_system(well(0.0), 0.0);
  const SpectrumReport r = eigen_spectrum(s0);
  for (const auto& e : eigenvalue_interval_bounds(r, 0.0)) CHECK(e.lower == e.upper);
  const auto iv = eigenvalue_interval_bounds(r, 0.001);
  const std::vector<double> pert = shifted_spectrum(well(0.0), square_well_perturbation(0.001), 0.0);
  for (const auto& e : iv) {
    if (std::abs(e.eigenvalue - 1.0) < 1e-12) {
      CHECK(e.lower == doctest::Approx(0.999));
      CHECK(e.upper == doctest::Approx(1.001));
    }
    bool hit = false;
    for (double x : pert) hit = hit || (x >= e.lower && x <= e.upper);
    CHECK(hit);
  }
}

TEST_CASE("verify bounds on the square well") {
  const VerificationReport r0 = verify_bounds(well(0.0), square_well_perturbation(0.001), 0.0);
  CHECK(r0.max_deviation == doctest::Approx(5.0037e-04).epsilon(1e-3));
  CHECK(r0.all_applicable_pass());
  const VerificationReport r1 = verify_bounds(well(1.0), square_well_perturbation(0.1), -0.5);
  CHECK(r1.max_deviation == doctest::Approx(1.3409e-01).epsilon(1e-3));
  CHECK(r1.all_applicable_pass());
  REQUIRE(r1.bundle);
  CHECK(r1.bundle->norm_product.value == doctest::Approx(0.2));

  const VerificationReport r17 = verify_bounds(well(1.7), square_well_perturbation(0.3), -0.85);
  CHECK(r17.max_deviation == doctest::Approx(1.4355).epsilon(1e-3));
  REQUIRE(r17.bundle);
  CHECK(r17.bundle->norm_product.value == doctest::Approx(2.0));
  CHECK_FALSE(r17.bundle->norm_product.valid);
  for (const auto& c : r17.checks) {
    if (c.name == "kappa_norm_product") CHECK_FALSE(c.applicable);
  }

  const VerificationReport z = verify_bounds(well(1.0), square_well_perturbation(0.0), -0.5);
  CHECK(z.max_deviation == 0.0);
}

TEST_CASE("verify bounds on random systems") {
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    const test::RandomCase rc = test::random_case(seed);
    const VerificationReport r = verify_bounds(rc.spec, test::random_delta(seed, rc.spec, 0.1), rc.shift);
    CHECK(r.all_applicable_pass());
  }
  CHECK_THROWS_AS(verify_bounds(well(1.0), random_perturbation(3, 0.1, 1), 0.0), Error);
}
