#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"
#include "ringlab/matrix.hpp"
#include "ringlab/rng.hpp"
#include "ringlab/sampling.hpp"

using namespace ringlab;

namespace {

// Greedy nearest matching between two multisets of complex numbers.
void check_multiset_close(std::vector<cplx> got, std::vector<cplx> expected,
                          double tol) {
  REQUIRE(got.size() == expected.size());
  for (const cplx& e : expected) {
    auto best = got.begin();
    for (auto it = got.begin(); it != got.end(); ++it)
      if (std::abs(*it - e) < std::abs(*best - e)) best = it;
    CHECK(std::abs(*best - e) <= tol);
    got.erase(best);
  }
}

double sum_log_abs(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::log(std::abs(z));
  return s;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("eigenvalues of a diagonal matrix") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 3.0});
  check_multiset_close(eigenvalues(a), {{3, 0}, {2, 0}, {1, 0}}, 1e-12);
}

TEST_CASE("eigenvalues of the quarter rotation are +-i") {
  Matrix a(2, Field::Real);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;
  check_multiset_close(eigenvalues(a), {{0, 1}, {0, -1}}, 1e-12);
}

TEST_CASE("eigenvalue product matches the LU determinant oracle") {
  const Matrix a = sample_ginibre(8, Field::Complex, SeedSpec{101, 0});
  const double log_det = oracles::lu_log_abs_det(a);
  CHECK(sum_log_abs(eigenvalues(a)) == doctest::Approx(log_det).epsilon(1e-8));
}

TEST_CASE("singular values of a diagonal matrix are absolute values") {
  const Matrix a = Matrix::diagonal(std::vector<double>{-3.0, 2.0});
  const auto sv = singular_values(a);
  REQUIRE(sv.size() == 2);
  CHECK(sv[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sv[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("singular values of a unitary matrix are 1") {
  const Matrix u = sample_haar(Group::U, 12, SeedSpec{5, 1});
  for (double s : singular_values(u)) CHECK(std::abs(s - 1.0) <= 1e-10);
}

TEST_CASE("singular value product matches the LU determinant oracle") {
  const Matrix a = sample_ginibre(8, Field::Real, SeedSpec{7, 3});
  const auto sv = singular_values(a);
  double log_prod = 0.0;
  for (double s : sv) log_prod += std::log(s);
  CHECK(log_prod == doctest::Approx(oracles::lu_log_abs_det(a)).epsilon(1e-8));
}

TEST_CASE("spectral radius basics") {
  CHECK(spectral_radius(Matrix::diagonal(std::vector<double>{1.0, 2.0})) ==
        doctest::Approx(2.0));
  Matrix rot(2, Field::Real);
  rot(0, 1) = 1.0;
  rot(1, 0) = -1.0;
  CHECK(spectral_radius(rot) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral radius dominates the geometric mean of |det|") {
  for (std::uint64_t trial = 0; trial < 4; ++trial) {
    const Matrix a = sample_ginibre(10, Field::Complex, SeedSpec{42, trial});
    const double geo =
        std::exp(oracles::lu_log_abs_det(a) / static_cast<double>(a.dim()));
    CHECK(spectral_radius(a) >= geo - 1e-8);
  }
}

TEST_CASE("qr_unitary of the identity is the identity") {
  const Matrix q = qr_unitary(Matrix::identity(5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(std::abs(q(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-14);
}

TEST_CASE("qr_unitary 1x1 sign is fixed by the positive-diagonal convention") {
  // [-2] = [-1] * [2]: the only factorization with R > 0.
  const Matrix q = qr_unitary(Matrix::diagonal(std::vector<double>{-2.0}));
  CHECK(q(0, 0).real() == doctest::Approx(-1.0));
  CHECK(q(0, 0).imag() == 0.0);
}

TEST_CASE("qr_unitary produces a unitary factor with positive diagonal R") {
  for (Field field : {Field::Real, Field::Complex}) {
    const Matrix g = sample_ginibre(16, field, SeedSpec{9, 9});
    const Matrix q = qr_unitary(g);
    CHECK(unitarity_residual(q) <= 1e-12 * 16);
    const Matrix r = matmul(q.adjoint(), g);
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(r(j, j).real() > 0.0);
      CHECK(std::abs(r(j, j).imag()) <= 1e-10);
    }
  }
}

TEST_CASE("qr_unitary flags rank deficiency") {
  Matrix g(3, Field::Real);  // zero matrix
  CHECK_THROWS_AS(qr_unitary(g), rank_deficient_error);
}

TEST_CASE("spectrum invariants: determinant identity and norm bound") {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    const Matrix a = sample_ginibre(64, Field::Complex, SeedSpec{11, trial});
    const Spectrum s = spectrum(a);
    const double log_det = lu_logdet(a).log_abs;
    double log_sv = 0.0;
    for (double v : s.singulars) log_sv += std::log(v);
    const double tol = 1e-8 * 64;
    CHECK(std::abs(sum_log_abs(s.eigenvalues) - log_det) <= tol);
    CHECK(std::abs(log_sv - log_det) <= tol);
    CHECK(std::abs(s.eigenvalues.front()) <= s.singulars.front() + 1e-10);
  }
}

TEST_CASE("lu_logdet agrees with the independent oracle") {
  const Matrix a = sample_ginibre(12, Field::Complex, SeedSpec{13, 0});
  CHECK(lu_logdet(a).log_abs ==
        doctest::Approx(oracles::lu_log_abs_det(a)).epsilon(1e-10));
}

TEST_CASE("unitary invariance of singular values") {
  const Matrix a = sample_ginibre(20, Field::Complex, SeedSpec{21, 0});
  const Matrix u = sample_haar(Group::U, 20, SeedSpec{21, 1});
  const auto sa = singular_values(a);
  const auto sua = singular_values(matmul(u, a));
  for (std::size_t i = 0; i < sa.size(); ++i)
    CHECK(std::abs(sa[i] - sua[i]) <= 1e-10 * sa.front());
}

TEST_CASE("spectral radius scales homogeneously") {
  const Matrix a = sample_ginibre(10, Field::Complex, SeedSpec{23, 0});
  const double rho = spectral_radius(a);
  const double rho3 = spectral_radius(a.scaled(3.0));
  CHECK(rho3 == doctest::Approx(3.0 * rho).epsilon(1e-10));
}

TEST_CASE("similarity preserves the eigenvalue multiset") {
  const Matrix a = sample_ginibre(8, Field::Complex, SeedSpec{29, 0});
  // well-conditioned P = I + 0.1 G
  Matrix p = Matrix::identity(8, Field::Complex);
  const Matrix g = sample_ginibre(8, Field::Complex, SeedSpec{29, 1});
  for (std::size_t i = 0; i < p.data().size(); ++i)
    p.data()[i] += 0.1 * g.data()[i];
  const Matrix similar = matmul(solve(p, a), p);  // P^{-1} A P
  check_multiset_close(eigenvalues(similar), eigenvalues(a), 1e-6);
}

TEST_CASE("eigenvalues rejects non-finite input with context") {
  Matrix a(2, Field::Real);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigenvalues(a, "seed=1 trial=2"), numerical_error);
  try {
    eigenvalues(a, "seed=1 trial=2");
  } catch (const numerical_error& e) {
    CHECK(std::string(e.what()).find("seed=1") != std::string::npos);
  }
}

TEST_CASE("matrix JSON round trip") {
  const Matrix a = sample_ginibre(3, Field::Complex, SeedSpec{31, 0});
  const Matrix b = matrix_from_json(matrix_to_json(a));
  REQUIRE(b.dim() == a.dim());
  CHECK(b.field() == Field::Complex);
  for (std::size_t i = 0; i < a.data().size(); ++i)
    CHECK(std::abs(a.data()[i] - b.data()[i]) == 0.0);

  const Matrix r = sample_ginibre(3, Field::Real, SeedSpec{31, 1});
  const Matrix r2 = matrix_from_json(matrix_to_json(r));
  CHECK(r2.field() == Field::Real);
  CHECK(r2.real_invariant_holds());
}

TEST_CASE("matrix JSON rejects a real field with nonzero imaginary part") {
  const std::string text =
      R"({"dim": 1, "field": "real", "re": [1.0], "im": [0.5]})";
  CHECK_THROWS_AS(matrix_from_json(text), config_error);
}

}  // TEST_SUITE
