#include "kg/error.hpp"
#include "kg/models.hpp"
#include "kg/operator_core.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace kg;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("symmetric matrix rejects asymmetric and non-finite input") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0 + 1e-6, 1.0;
  CHECK_THROWS_AS(SymmetricMatrix{m}, Error);
  try {
    SymmetricMatrix s{m};
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSymmetric);
  }
  m(1, 0) = 2.0 + 1e-14;
  const SymmetricMatrix s{m};
  CHECK(s.matrix()(0, 1) == s.matrix()(1, 0));
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(SymmetricMatrix{m}, Error);
  CHECK_THROWS_AS(SymmetricMatrix{Matrix(2, 3)}, Error);
}

TEST_CASE("model spec validates order and definiteness") {
  CHECK_THROWS_AS(ModelSpec(SymmetricMatrix::identity(2), SymmetricMatrix::zero(3)), Error);
  try {
    ModelSpec(SymmetricMatrix(diag2(1.0, -1.0)), SymmetricMatrix::zero(2));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(e.category() == ErrorCategory::Validation);
  }
  CHECK_THROWS_AS(ModelSpec(SymmetricMatrix(diag2(1.0, 0.0)), SymmetricMatrix::zero(2)), Error);
}

TEST_CASE("sqrt_spd") {
  CHECK(sqrt_spd(SymmetricMatrix::identity(3)).matrix().isApprox(Matrix::Identity(3, 3), 1e-14));
  const Matrix r = sqrt_spd(SymmetricMatrix(diag2(4.0, 9.0))).matrix();
  CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(r(0, 1)) < 1e-14);

  SplitMix64 rng(7);
  const Matrix m = test::random_spd(rng, 6);
  const Matrix root = sqrt_spd(SymmetricMatrix(m)).matrix();
  CHECK((root * root - m).norm() <= 1e-10);
  CHECK_THROWS_AS(sqrt_spd(SymmetricMatrix(diag2(1.0, -2.0))), Error);
}

TEST_CASE("assembly of the free system") {
  const ModelSpec free(SymmetricMatrix::identity(2), SymmetricMatrix::zero(2));
  const KleinGordonSystem sys = assemble_system(free, 0.0);
  Matrix expected = Matrix::Zero(4, 4);
  expected.topRightCorner(2, 2) = Matrix::Identity(2, 2);
  expected.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);
  CHECK((sys.hamiltonian - expected).norm() < 1e-14);
  CHECK(sys.contraction == 0.0);

  const ModelSpec d(SymmetricMatrix(diag2(1.0, 3.0)), SymmetricMatrix::zero(2));
  const FreeSystem f = assemble_free(d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.free_hamiltonian);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-std::sqrt(3.0)));
  CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
  CHECK(es.eigenvalues()(3) == doctest::Approx(std::sqrt(3.0)));
  // sign(H0) = H0 |H0|^{-1} = J
  const Matrix sign = f.free_hamiltonian * f.u_block.inverse();
  CHECK((sign - swap_symmetry(2)).norm() < 1e-12);
}

TEST_CASE("structural invariants on random systems") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const test::RandomCase rc = test::random_case(seed);
    const KleinGordonSystem sys = assemble_system(rc.spec, rc.shift);
    CHECK((swap_symmetry(sys.n) * sys.hamiltonian - sys.gram).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(asymmetry(sys.gram) == 0.0);
    Eigen::JacobiSVD<Matrix> svd(sys.a_matrix);
    CHECK(sys.contraction == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
    CHECK(sys.contraction == doctest::Approx(rc.contraction).epsilon(1e-10));
    Eigen::SelfAdjointEigenSolver<Matrix> es(sys.shifted_gram(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) > 0.0);
    // G - mu J = diag(U^{1/2}) [[I, A^T], [A, I]] diag(U^{1/2})
    Matrix half = Matrix::Zero(2 * sys.n, 2 * sys.n);
    half.topLeftCorner(sys.n, sys.n) = sys.u_quarter;
    half.bottomRightCorner(sys.n, sys.n) = sys.u_quarter;
    CHECK((half * sys.block_a() * half - sys.shifted_gram()).norm() <= 1e-10 * sys.gram.norm());
  }
}

TEST_CASE("square well assembly") {
  const ModelSpec tau1 = square_well_model({1.0, std::nullopt});
  // Eigenvalues of H are roots of det((l - V)^2 - U^2) = ((l + 1)^2 - 2)(l^2 - 2) - 1.
  const KleinGordonSystem sys = assemble_system(tau1, 0.0);
  Eigen::EigenSolver<Matrix> es(sys.hamiltonian, false);
  for (Index k = 0; k < 4; ++k) {
    const Complex l = es.eigenvalues()(k);
    const Complex det = ((l + 1.0) * (l + 1.0) - 2.0) * (l * l - 2.0) - 1.0;
    CHECK(std::abs(det) < 1e-10);
  }

  const ModelSpec tau2 = square_well_model({2.0, std::nullopt});
  const KleinGordonSystem sys2 = assemble_system(tau2, -1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> g(sys2.shifted_gram(), Eigen::EigenvaluesOnly);
  CHECK(std::abs(g.eigenvalues()(0)) < 1e-12);
  CHECK(unit_roots(tau2.u_squared()).u_min == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("operator A and contraction") {
  const ModelSpec zero(SymmetricMatrix::identity(3), SymmetricMatrix::zero(3));
  CHECK(operator_a(zero, 0.0).norm() == 0.0);
  const ModelSpec free(SymmetricMatrix(diag2(4.0, 9.0)), SymmetricMatrix::zero(2));
  CHECK(contraction_bound(free, 0.7) == doctest::Approx(0.7 * 0.5).epsilon(1e-14));

  for (double tau : {0.0, 0.3, 1.0, 1.7, 1.9}) {
    const ModelSpec s = square_well_model({tau, std::nullopt});
    CHECK(std::abs(contraction_bound(s, -tau / 2.0) - tau / 2.0) <= 1e-12);
  }
  const ModelSpec s1 = square_well_model({1.0, std::nullopt});
  CHECK(contraction_bound(s1, 0.0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));

  const test::RandomCase rc = test::random_case(3);
  const Matrix a = operator_a(rc.spec, 0.25);
  Eigen::JacobiSVD<Matrix> svd(a);
  CHECK(contraction_bound(rc.spec, 0.25) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
}

TEST_CASE("optimize_shift") {
  const ModelSpec zero(SymmetricMatrix(diag2(2.0, 5.0)), SymmetricMatrix::zero(2));
  const ShiftOptimum z = optimize_shift(zero);
  CHECK(std::abs(z.shift) < 1e-8);
  CHECK(z.contraction < 1e-8);

  const ModelSpec constant(SymmetricMatrix(diag2(2.0, 5.0)), SymmetricMatrix(diag2(0.8, 0.8)));
  const ShiftOptimum c = optimize_shift(constant);
  CHECK(c.shift == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(c.contraction < 1e-8);

  const ShiftOptimum w = optimize_shift(square_well_model({1.0, std::nullopt}));
  CHECK(w.contraction <= 0.5 + 1e-12);

  // Never worse than a fine scan.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const test::RandomCase rc = test::random_case(seed);
    const ShiftOptimum o = optimize_shift(rc.spec);
    for (int k = -50; k <= 50; ++k) {
      CHECK(o.contraction <= contraction_bound(rc.spec, rc.shift + 0.02 * k) + 1e-9);
    }
  }
}
