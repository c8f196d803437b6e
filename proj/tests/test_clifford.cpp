#include <random>
#include <vector>

#include "cliffdyn/clifford.hpp"
#include "doctest.h"
#include "exact.hpp"

using namespace cliffdyn;

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

// Hermitian matrix with prescribed eigenvalues and a random unitary frame.
CMatrix hermitian_with_spectrum(std::mt19937_64& rng, const Eigen::VectorXd& spectrum) {
  const Eigen::Index n = spectrum.size();
  const CMatrix q = Eigen::HouseholderQR<CMatrix>(random_hermitian(rng, n) + CMatrix::Random(n, n))
                        .householderQ() *
                    CMatrix::Identity(n, n);
  return q * spectrum.cast<Complex>().asDiagonal() * q.adjoint();
}

ClVector random_vector(std::mt19937_64& rng, const SpacePtr& space) {
  std::normal_distribution<double> g;
  CVector c(static_cast<Eigen::Index>(space->dim()));
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = Complex(g(rng), g(rng));
  return ClVector(space, c);
}

}  // namespace

TEST_CASE("generator products follow the sign classes") {
  const SpacePtr space = GeneratorSpace::allocate(2, 2);
  const auto g1 = ClVector::generator(space, 0);
  const auto g2 = ClVector::generator(space, 1);
  const auto h1 = ClVector::generator(space, 2);
  CHECK(bullet(g1, g1) == Complex(2.0, 0.0));
  CHECK(bullet(h1, h1) == Complex(-2.0, 0.0));
  CHECK(bullet(g1, h1) == Complex(0.0, 0.0));
  CHECK(bullet(g1, g2) == Complex(0.0, 0.0));
}

TEST_CASE("generator index past the space is rejected") {
  const SpacePtr space = GeneratorSpace::allocate(1, 0);
  CHECK_NOTHROW(ClVector::generator(space, 0));
  CHECK_THROWS_AS(ClVector::generator(space, 1), std::out_of_range);
  CHECK_THROWS_AS(GeneratorSpace::allocate(0, 0), InputError);
}

TEST_CASE("bullet matches exact Gaussian-rational evaluation") {
  // Half-integer coefficients over Cl(3,2); oracle is Σ 2 s_k a_k b_k in exact arithmetic.
  const SpacePtr space = GeneratorSpace::allocate(3, 2);
  const std::vector<int> signs = {1, 1, 1, -1, -1};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(-6, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<exact::GaussianRational> a, b;
    CVector ca(5), cb(5);
    for (int k = 0; k < 5; ++k) {
      a.push_back({exact::Rational(pick(rng), 2), exact::Rational(pick(rng), 2)});
      b.push_back({exact::Rational(pick(rng), 2), exact::Rational(pick(rng), 2)});
      ca(k) = a.back().to_complex();
      cb(k) = b.back().to_complex();
    }
    exact::GaussianRational expected{};
    for (int k = 0; k < 5; ++k) expected = expected + exact::GaussianRational{2 * signs[k], 0} * a[k] * b[k];
    const Complex got = bullet(ClVector(space, ca), ClVector(space, cb));
    CHECK(got == expected.to_complex());
  }
}

TEST_CASE("bullet is symmetric, bilinear and commutes with conjugation") {
  const SpacePtr space = GeneratorSpace::allocate(4, 4);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_vector(rng, space);
    const auto v = random_vector(rng, space);
    const auto w = random_vector(rng, space);
    const Complex alpha(0.3 * trial - 2.0, 1.7);
    CHECK(bullet(u, v) == bullet(v, u));
    CHECK(std::abs(bullet(alpha * u + v, w) - (alpha * bullet(u, w) + bullet(v, w))) < 1e-12);
    CHECK(std::abs(bullet(conj(u), conj(v)) - std::conj(bullet(u, v))) < 1e-12);
    CHECK(conj(conj(u)).coeffs() == u.coeffs());
  }
}

TEST_CASE("mismatched spaces are rejected") {
  const auto a = ClVector::generator(GeneratorSpace::allocate(2, 2), 0);
  const auto b = ClVector::generator(GeneratorSpace::allocate(3, 1), 0);
  CHECK_THROWS_AS(bullet(a, b), InputError);
  const auto c = ClVector::generator(GeneratorSpace::allocate(2, 2), 1);
  CHECK_NOTHROW(bullet(a, c));
}

TEST_CASE("standard basis has the proposition's signs") {
  const SpacePtr space = GeneratorSpace::allocate(4, 4);
  const StandardBasis sb = standard_basis(space);
  REQUIRE(sb.e.size() == 2);
  REQUIRE(sb.f.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double d = i == j ? 1.0 : 0.0;
      CHECK(bullet(sb.e[i], conj(sb.e[j])) == Complex(-d, 0.0));
      CHECK(bullet(sb.f[i], conj(sb.f[j])) == Complex(d, 0.0));
      CHECK(bullet(sb.e[i], sb.e[j]) == Complex(0.0, 0.0));
      CHECK(bullet(sb.f[i], sb.f[j]) == Complex(0.0, 0.0));
      CHECK(bullet(sb.e[i], sb.f[j]) == Complex(0.0, 0.0));
      CHECK(bullet(sb.e[i], conj(sb.f[j])) == Complex(0.0, 0.0));
    }
  }
  const auto z = sb.e[0] + sb.f[0];
  CHECK(bullet(z, conj(z)) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(standard_basis(GeneratorSpace::allocate(3, 3)), InputError);
  CHECK_THROWS_AS(standard_basis(GeneratorSpace::allocate(4, 2)), InputError);
}

TEST_CASE("Hermitian validation") {
  CMatrix bad(2, 2);
  bad << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
  CHECK_THROWS_AS(HermitianMatrix{bad}, InputError);
  CHECK_THROWS_AS(HermitianMatrix{CMatrix(2, 3)}, InputError);
  CMatrix ok(2, 2);
  ok << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
  CHECK_NOTHROW(HermitianMatrix{ok});
}

TEST_CASE("Jacobi eigensolver") {
  SUBCASE("diagonal input") {
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = -1.0;
    h(1, 1) = 3.0;
    const auto eig = hermitian_eig(h);
    CHECK(eig.values(0) == 3.0);
    CHECK(eig.values(1) == -1.0);
    CHECK(std::abs(std::abs(eig.vectors(1, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(eig.vectors(0, 1)) - 1.0) < 1e-15);
  }
  SUBCASE("Pauli x") {
    CMatrix h(2, 2);
    h << 0.0, 1.0, 1.0, 0.0;
    const auto eig = hermitian_eig(h);
    CHECK(eig.values(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eig.values(1) == doctest::Approx(-1.0).epsilon(1e-15));
  }
  SUBCASE("ties keep index order") {
    const CMatrix h = CMatrix::Identity(3, 3);
    const auto eig = hermitian_eig(h);
    CHECK(eig.vectors == CMatrix::Identity(3, 3));
  }
  SUBCASE("random matrices reconstruct against an independent solver") {
    std::mt19937_64 rng(3);
    for (Eigen::Index n : {1, 2, 3, 5, 8, 16}) {
      const CMatrix h = random_hermitian(rng, n);
      const auto eig = hermitian_eig(h);
      const CMatrix rebuilt = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
      CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((eig.vectors.adjoint() * eig.vectors - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-11);
      Eigen::SelfAdjointEigenSolver<CMatrix> ref(h);
      Eigen::VectorXd expected = ref.eigenvalues().reverse();
      CHECK((eig.values - expected).cwiseAbs().maxCoeff() < 1e-11);
      for (Eigen::Index k = 1; k < n; ++k) CHECK(eig.values(k - 1) >= eig.values(k));
    }
  }
}

TEST_CASE("resolve_hermitian reproduces signed diagonal matrices exactly") {
  const SpacePtr space = GeneratorSpace::allocate(4, 4);
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  const auto res = resolve_hermitian(HermitianMatrix(h), space);
  const auto sb = standard_basis(space);
  CHECK(res.vectors[0].coeffs() == sb.f[0].coeffs());
  CHECK(res.vectors[1].coeffs() == sb.e[1].coeffs());
  CHECK(res.residual() == 0.0);
  CHECK(res.null_residual() == 0.0);
}

TEST_CASE("zero matrix resolves to the null combination") {
  const SpacePtr space = GeneratorSpace::allocate(2, 2);
  const auto res = resolve_hermitian(HermitianMatrix(CMatrix::Zero(1, 1)), space);
  const auto sb = standard_basis(space);
  CHECK(res.vectors[0].coeffs() == (sb.e[0] + sb.f[0]).coeffs());
  CHECK(bullet(res.vectors[0], conj(res.vectors[0])) == Complex(0.0, 0.0));
}

TEST_CASE("resolve_hermitian on random signatures") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> sign_pick(-1, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    Eigen::VectorXd spectrum(n);
    for (Eigen::Index k = 0; k < n; ++k) spectrum(k) = sign_pick(rng) * (0.5 + 0.25 * static_cast<double>(k));
    const CMatrix h = hermitian_with_spectrum(rng, spectrum);
    const SpacePtr space = GeneratorSpace::allocate(2 * static_cast<std::size_t>(n), 2 * static_cast<std::size_t>(n));
    const auto res = resolve_hermitian(HermitianMatrix(h, 1e-12), space);
    CHECK(res.residual() < 1e-10);
    CHECK(res.null_residual() < 1e-12);
  }
}

TEST_CASE("resolve_hermitian refuses an undersized space") {
  const SpacePtr space = GeneratorSpace::allocate(2, 2);
  CHECK_THROWS_AS(resolve_hermitian(HermitianMatrix(CMatrix::Identity(2, 2)), space), InputError);
}

TEST_CASE("resolve_pair reproduces all three Gram blocks") {
  Matrix2c x, p;
  x << 2.0, Complex(0.3, -0.1), Complex(0.3, 0.1), 1.5;
  p << 1.2, Complex(-0.2, 0.4), Complex(-0.2, -0.4), 0.9;

  SUBCASE("M = 0 decouples c and d*") {
    const auto res = resolve_pair(x, p, Matrix2c::Zero());
    CHECK((res.x() - x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((res.p() - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(res.mixed().cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("Noether-constrained mixed products") {
    const auto res = resolve_pair(x, p, Matrix2c::Identity());
    CHECK((res.mixed() - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((res.x() - x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((res.p() - p).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("random mixed products") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
      const Matrix2c m = Matrix2c::Random() * 1.5;
      const auto res = resolve_pair(x, p, m);
      CHECK((res.x() - x).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((res.p() - p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((res.mixed() - m).cwiseAbs().maxCoeff() < 1e-10);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          CHECK(std::abs(bullet(res.c[a], res.c[b])) < 1e-12);
          CHECK(std::abs(bullet(res.dstar[a], res.dstar[b])) < 1e-12);
        }
    }
  }
  SUBCASE("missing h-block and non-Hermitian input") {
    const SpacePtr space = GeneratorSpace::allocate_blocks({{"c", 2}, {"d", 2}, {"h", 1}});
    CHECK_THROWS_AS(resolve_pair(x, p, Matrix2c::Zero(), space, space->block("c"), space->block("d"),
                                 space->block("h")),
                    InputError);
    CHECK_THROWS_AS(space->block("missing"), InputError);
    Matrix2c skew = x;
    skew(0, 1) = Complex(5.0, 0.0);
    CHECK_THROWS_AS(resolve_pair(skew, p, Matrix2c::Zero()), InputError);
  }
}
