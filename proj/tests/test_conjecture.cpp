#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "ringlab/conjecture.hpp"
#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"

using namespace ringlab;

namespace {

GrassmannFrame coordinate_frame(std::size_t d, std::size_t k) {
  GrassmannFrame f{d, k, Field::Real, std::vector<cplx>(d * k)};
  for (std::size_t j = 0; j < k; ++j) f.at(j, j) = 1.0;
  return f;
}

}  // namespace

TEST_SUITE("conjecture") {

TEST_CASE("log_top_eigs on diagonal and rotation matrices") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 4.0});
  CHECK(log_top_eigs(a, 2) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  CHECK(log_top_eigs(a, 3) ==
        doctest::Approx(lu_logdet(a).log_abs).epsilon(1e-12));

  Matrix rot(2, Field::Real);
  rot(0, 1) = 1.0;
  rot(1, 0) = -1.0;
  CHECK(log_top_eigs(rot, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log_top_eigs rejects singular matrices") {
  const Matrix a = Matrix::diagonal(std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(log_top_eigs(a, 2), numerical_error);
}

TEST_CASE("grassmann distortion of a coordinate plane") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 3.0});
  const auto dist = grassmann_distortion(a, coordinate_frame(3, 2));
  CHECK(dist.volume == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dist.gram_det == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(dist.log_volume == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("grassmann distortion with k=1 is the image norm") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0});
  const auto frame = sample_grassmann_frame(2, 1, Field::Real, SeedSpec{97, 0});
  const auto v0 = frame.at(0, 0).real();
  const auto v1 = frame.at(1, 0).real();
  const double norm = std::hypot(v0, 2.0 * v1);
  CHECK(grassmann_distortion(a, frame).volume ==
        doctest::Approx(norm).epsilon(1e-12));
}

TEST_CASE("grassmann distortion is invariant under frame rotation") {
  const Matrix a = sample_ginibre(6, Field::Complex, SeedSpec{101, 5});
  const auto frame =
      sample_grassmann_frame(6, 3, Field::Complex, SeedSpec{101, 6});
  // right-multiply the frame by a random 3x3 unitary
  const Matrix q = sample_haar(Group::U, 3, SeedSpec{101, 7});
  GrassmannFrame rotated = frame;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t l = 0; l < 3; ++l) acc += frame.at(i, l) * q(l, j);
      rotated.at(i, j) = acc;
    }
  const double a_log = grassmann_distortion(a, frame).log_volume;
  const double b_log = grassmann_distortion(a, rotated).log_volume;
  CHECK(std::abs(a_log - b_log) <= 1e-10);
}

TEST_CASE("binomial floor constants") {
  CHECK(armentano_floor(4, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(armentano_floor(3, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(armentano_floor(60, 30) ==
        doctest::Approx(1.0 / 118264581564861424.0).epsilon(1e-12));
  CHECK(log_binomial(200, 100) ==
        doctest::Approx(std::lgamma(201.0) - 2.0 * std::lgamma(101.0))
            .epsilon(1e-12));
}

TEST_CASE("estimate_lhs of a scalar matrix has zero variance") {
  const Matrix a = Matrix::identity(4).scaled(2.0);
  const auto est = estimate_lhs(a, Group::SO, 2, 50, SeedSpec{103, 0});
  CHECK(est.mean == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(est.variance <= 1e-20);
}

TEST_CASE("estimate_lhs with k=d collapses to the determinant") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 4.0});
  const auto est = estimate_lhs(a, Group::SU, 3, 40, SeedSpec{107, 0});
  CHECK(est.mean == doctest::Approx(std::log(8.0)).epsilon(1e-9));
  CHECK(std::sqrt(est.variance) <= 1e-10);
}

TEST_CASE("estimate_rhs with k=d collapses to the determinant") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 4.0});
  const auto est =
      estimate_rhs(a, 3, 40, SeedSpec{109, 0}, Field::Complex);
  CHECK(est.mean == doctest::Approx(std::log(8.0)).epsilon(1e-9));
  CHECK(std::sqrt(est.variance) <= 1e-10);
}

TEST_CASE("d=2 lhs estimate matches the SO(2) quadrature oracle") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0});
  const auto est = estimate_lhs(a, Group::SO, 1, 4000, SeedSpec{113, 0});
  // lambda_1 of R_theta A: trace 3 cos(theta), det 2
  const double quad = oracles::circle_quadrature([](double theta) {
    const double tr = 3.0 * std::cos(theta);
    const double disc = tr * tr - 8.0;
    if (disc >= 0.0)
      return std::log((std::abs(tr) + std::sqrt(disc)) / 2.0);
    return 0.5 * std::log(2.0);  // complex pair of modulus sqrt(det)
  });
  CHECK(std::abs(est.mean - quad) <= 4.0 * est.std_error());
}

TEST_CASE("d=2 rhs estimate matches the circle quadrature oracle") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0});
  const auto est = estimate_rhs(a, 1, 4000, SeedSpec{127, 0}, Field::Real);
  const double quad = oracles::circle_quadrature([](double theta) {
    return std::log(std::hypot(std::cos(theta), 2.0 * std::sin(theta)));
  });
  CHECK(std::abs(est.mean - quad) <= 4.0 * est.std_error());
}

TEST_CASE("conjecture report on a scalar matrix") {
  const Matrix a = Matrix::identity(4).scaled(2.0);
  const auto report = conjecture_report(a, Group::SO, 2, 60, SeedSpec{131, 0});
  CHECK(report.floor_c == doctest::Approx(1.0 / 6.0));
  CHECK(report.c_hat_defined);
  CHECK(report.c_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.floor_pass);
  CHECK(report.unit_pass);
}

TEST_CASE("conjecture report flags an undefined c_hat") {
  // A = I: both integrands vanish identically.
  const auto report =
      conjecture_report(Matrix::identity(3), Group::SO, 1, 50, SeedSpec{137, 0});
  CHECK(!report.c_hat_defined);
  CHECK(report.floor_pass);
  CHECK(report.unit_pass);
}

TEST_CASE("scaling shifts both conjecture estimates by k log c") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 4.0});
  const SeedSpec seed{139, 0};
  const std::size_t k = 2;
  const auto lhs1 = estimate_lhs(a, Group::SO, k, 200, seed);
  const auto lhs2 = estimate_lhs(a.scaled(2.0), Group::SO, k, 200, seed);
  CHECK(lhs2.mean - lhs1.mean ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
  const auto rhs1 = estimate_rhs(a, k, 200, seed, Field::Real);
  const auto rhs2 = estimate_rhs(a.scaled(2.0), k, 200, seed, Field::Real);
  CHECK(rhs2.mean - rhs1.mean ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("spectral radius of UA is caged by determinant and norm") {
  const auto law = SpectralLaw::two_atom(1.0, 2.0);
  const Matrix a = quantile_matrix(law, 16);
  const double geo = std::exp(lu_logdet(a).log_abs / 16.0);
  const double sigma1 = singular_values(a).front();
  for (std::uint64_t t = 0; t < 6; ++t) {
    const Matrix u = sample_haar(Group::SU, 16, SeedSpec{149, t});
    const double rho = spectral_radius(matmul(u, a));
    CHECK(rho >= geo - 1e-8);
    CHECK(rho <= sigma1 + 1e-10);
  }
}

TEST_CASE("sphere pushforward of diag(1,2) on the real circle") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0});
  const auto stats =
      sphere_pushforward_stats(a, 20000, SeedSpec{151, 0}, Field::Real);
  CHECK(std::abs(stats.norm_sq.mean - 2.5) <= 4.0 * stats.norm_sq.std_error());
  // quadrature cross-check of E||Av||
  const double quad = oracles::circle_quadrature([](double theta) {
    return std::hypot(std::cos(theta), 2.0 * std::sin(theta));
  });
  CHECK(std::abs(stats.norm.mean - quad) <= 4.0 * stats.norm.std_error());
  CHECK(stats.lipschitz_L == doctest::Approx(8.0).epsilon(1e-10));
  CHECK(stats.sphere_real_dim == 2);
}

TEST_CASE("sphere pushforward of the identity is constant") {
  const auto stats = sphere_pushforward_stats(Matrix::identity(8), 100,
                                              SeedSpec{157, 0}, Field::Complex);
  CHECK(stats.norm.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats.norm.variance <= 1e-24);
  CHECK(stats.sphere_real_dim == 16);
}

TEST_CASE("empirical tails are nonincreasing in epsilon") {
  const auto law = SpectralLaw::two_atom(1.0, 2.0);
  const auto stats = sphere_pushforward_stats(
      quantile_matrix(law, 32), 5000, SeedSpec{163, 0}, Field::Complex);
  for (std::size_t i = 1; i < stats.tail_empirical.size(); ++i)
    CHECK(stats.tail_empirical[i] <= stats.tail_empirical[i - 1]);
  CHECK(stats.c_fitted > 0.0);
}

TEST_CASE("complex-sphere mean of ||Av||^2 matches (1/d) sum a_i^2") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 3.0});
  const auto stats =
      sphere_pushforward_stats(a, 20000, SeedSpec{167, 0}, Field::Complex);
  const double target = (1.0 + 4.0 + 9.0) / 3.0;
  CHECK(std::abs(stats.norm_sq.mean - target) <=
        4.0 * stats.norm_sq.std_error());
}

TEST_CASE("single ring trial smoke test at d=2") {
  const auto law = SpectralLaw::two_atom(1.0, 2.0);
  const auto trial = single_ring_trial(law, 2, Group::SU, RotationSpec{},
                                       SeedSpec{173, 0}, 0.1);
  REQUIRE(trial.cloud.size() == 2);
  CHECK(std::isfinite(*trial.record.rho));
  CHECK(*trial.record.annulus_coverage >= 0.0);
  CHECK(*trial.record.annulus_coverage <= 1.0);
  CHECK(std::isfinite(*trial.record.lp_distance));
  CHECK(*trial.record.r_plus_target ==
        doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(*trial.record.r_minus_target ==
        doctest::Approx(std::sqrt(1.6)).epsilon(1e-12));
}

TEST_CASE("single-point laws are rejected before any trial runs") {
  CHECK_THROWS_AS(SpectralLaw::finite_atoms({{1.0, 0.5}, {1.0, 0.5}}),
                  config_error);
}

TEST_CASE("conjecture estimates match in law under two-sided rotation") {
  // lhs means for A and for a fixed W A V should be equidistributed when the
  // Haar stream is redrawn per repetition.
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  const Matrix wav =
      rotate_ensemble(a, RotationSpec{true, Group::U}, SeedSpec{197, 4242});
  std::vector<double> means_a, means_wav;
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    means_a.push_back(
        estimate_lhs(a, Group::SU, 1, 200, SeedSpec{198, rep}).mean);
    means_wav.push_back(
        estimate_lhs(wav, Group::SU, 1, 200, SeedSpec{199, rep}).mean);
  }
  CHECK(ks_two_sample(means_a, means_wav).p_value > 0.001);
}

TEST_CASE("welford merge equals a single pass") {
  RandomStream rng(SeedSpec{179, 0});
  std::vector<double> values(1000);
  for (auto& v : values) v = rng.gaussian() * 3.0 + 1.0;
  RunningStats whole;
  for (double v : values) whole.add(v);
  // merge in uneven chunks
  RunningStats merged;
  std::size_t idx = 0;
  for (std::size_t chunk : {7, 100, 250, 643}) {
    RunningStats part;
    for (std::size_t i = 0; i < chunk; ++i) part.add(values[idx++]);
    merged.merge(part);
  }
  REQUIRE(idx == values.size());
  CHECK(merged.count() == whole.count());
  CHECK(merged.mean() == doctest::Approx(whole.mean()).epsilon(1e-13));
  CHECK(merged.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
}

TEST_CASE("estimates are identical at any thread count") {
  const Matrix a = Matrix::diagonal(std::vector<double>{1.0, 2.0, 4.0});
  omp_set_num_threads(1);
  const auto one = estimate_lhs(a, Group::SO, 1, 300, SeedSpec{181, 0});
  omp_set_num_threads(2);
  const auto two = estimate_lhs(a, Group::SO, 1, 300, SeedSpec{181, 0});
  CHECK(one.mean == two.mean);
  CHECK(one.variance == two.variance);
  CHECK(one.n == two.n);
}

}  // TEST_SUITE
