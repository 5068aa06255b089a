#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "ringlab/ensembles.hpp"
#include "ringlab/linalg.hpp"
#include "ringlab/measures.hpp"
#include "ringlab/rng.hpp"
#include "ringlab/sampling.hpp"

using namespace ringlab;

namespace {

EmpiricalMeasure delta(cplx z) {
  return EmpiricalMeasure({WeightedAtom{z, 1.0}});
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("empirical eigenvalue measure of diag(1,2)") {
  const auto mu =
      empirical_eigenvalues(Matrix::diagonal(std::vector<double>{1.0, 2.0}));
  REQUIRE(mu.size() == 2);
  double total = 0.0;
  for (const auto& a : mu.atoms()) {
    CHECK(a.weight == doctest::Approx(0.5));
    total += a.weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical eigenvalues of a unitary sit on the unit circle") {
  const Matrix u = sample_haar(Group::U, 16, SeedSpec{47, 0});
  const auto mu = empirical_eigenvalues(u);
  for (const auto& a : mu.atoms())
    CHECK(std::abs(std::abs(a.location) - 1.0) <= 1e-8);
}

TEST_CASE("empirical singular measure is unitarily invariant") {
  const Matrix a = sample_ginibre(12, Field::Complex, SeedSpec{53, 0});
  const Matrix u = sample_haar(Group::U, 12, SeedSpec{53, 1});
  const auto sa = empirical_singulars(a).atoms();
  const auto sua = empirical_singulars(matmul(u, a)).atoms();
  REQUIRE(sa.size() == sua.size());
  for (std::size_t i = 0; i < sa.size(); ++i)
    CHECK(std::abs(sa[i].location - sua[i].location) <= 1e-10);
}

TEST_CASE("levy_prokhorov identity of indiscernibles") {
  RandomStream rng(SeedSpec{59, 0});
  const auto mu = oracles::random_measure(rng);
  CHECK(levy_prokhorov(mu, mu) == 0.0);
}

TEST_CASE("levy_prokhorov of the documented half/half example is 0.5") {
  const EmpiricalMeasure alpha({{cplx{0, 0}, 0.5}, {cplx{1, 0}, 0.5}});
  const EmpiricalMeasure beta({{cplx{0, 0}, 1.0}});
  CHECK(levy_prokhorov(alpha, beta, 1e-5) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(oracles::levy_prokhorov_bruteforce(alpha, beta) ==
        doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("levy_prokhorov between point masses is min(distance, 1)") {
  CHECK(levy_prokhorov(delta({0.0, 0.0}), delta({0.3, 0.0}), 1e-5) ==
        doctest::Approx(0.3).epsilon(1e-3));
  CHECK(levy_prokhorov(delta({0.0, 0.0}), delta({5.0, 0.0}), 1e-5) ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(oracles::levy_prokhorov_bruteforce(delta({0.0, 0.0}),
                                           delta({0.3, 0.0})) ==
        doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("levy_prokhorov agrees with the exhaustive oracle") {
  RandomStream rng(SeedSpec{61, 0});
  for (int pair = 0; pair < 40; ++pair) {
    const auto a = oracles::random_measure(rng);
    const auto b = oracles::random_measure(rng);
    const double fast = levy_prokhorov(a, b, 2e-5);
    const double brute = oracles::levy_prokhorov_bruteforce(a, b, 2e-5);
    CHECK(std::abs(fast - brute) <= 1e-4);
  }
}

TEST_CASE("levy_prokhorov metric axioms on random measures") {
  RandomStream rng(SeedSpec{67, 0});
  const double tol = 1e-4;
  for (int triple = 0; triple < 40; ++triple) {
    const auto a = oracles::random_measure(rng);
    const auto b = oracles::random_measure(rng);
    const auto c = oracles::random_measure(rng);
    const double ab = levy_prokhorov(a, b, tol);
    const double ba = levy_prokhorov(b, a, tol);
    const double ac = levy_prokhorov(a, c, tol);
    const double cb = levy_prokhorov(c, b, tol);
    CHECK(ab == ba);  // canonical ordering makes symmetry exact
    CHECK(ab <= ac + cb + 2.0 * tol);
    CHECK(ab <= 1.0);
    CHECK(levy_prokhorov(a, a, tol) == 0.0);
  }
}

TEST_CASE("levy_prokhorov refuses oversized atom products") {
  std::vector<cplx> many(3000);
  for (std::size_t i = 0; i < many.size(); ++i)
    many[i] = {static_cast<double>(i), 0.0};
  const auto mu = EmpiricalMeasure::uniform(many);
  CHECK_THROWS_AS(levy_prokhorov(mu, mu, 1e-4, 1 << 20), std::length_error);
}

TEST_CASE("ring radii of a single atom") {
  const auto radii = ring_radii(delta({1.0, 0.0}));
  CHECK(radii.r_minus == doctest::Approx(1.0));
  CHECK(radii.r_plus == doctest::Approx(1.0));
}

TEST_CASE("ring radii of the half/half two-atom law") {
  const EmpiricalMeasure mu({{cplx{1, 0}, 0.5}, {cplx{2, 0}, 0.5}});
  const auto radii = ring_radii(mu);
  CHECK(radii.r_plus == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(radii.r_minus == doctest::Approx(std::sqrt(1.6)).epsilon(1e-12));
}

TEST_CASE("ring radii from the empirical singular measure of diag(1,2)") {
  const auto mu =
      empirical_singulars(Matrix::diagonal(std::vector<double>{1.0, 2.0}));
  const auto radii = ring_radii(mu);
  CHECK(radii.r_plus == doctest::Approx(std::sqrt(2.5)).epsilon(1e-10));
  CHECK(radii.r_minus == doctest::Approx(std::sqrt(1.6)).epsilon(1e-10));
}

TEST_CASE("ring radii scale exactly with the measure") {
  RandomStream rng(SeedSpec{71, 0});
  std::vector<WeightedAtom> atoms;
  for (int i = 0; i < 5; ++i)
    atoms.push_back({cplx{1.0 + rng.uniform01(), 0.0}, 0.2});
  const EmpiricalMeasure mu(atoms);
  for (auto& a : atoms) a.location *= 2.0;
  const EmpiricalMeasure mu2(atoms);
  const auto r = ring_radii(mu);
  const auto r2 = ring_radii(mu2);
  CHECK(r2.r_plus == 2.0 * r.r_plus);
  CHECK(r2.r_minus == 2.0 * r.r_minus);
}

TEST_CASE("ring radii reject an atom at zero") {
  CHECK_THROWS_AS(ring_radii(delta({0.0, 0.0})), std::domain_error);
}

TEST_CASE("annulus coverage counts weight inside the fattened ring") {
  const RingRadii radii{1.0, 2.0};
  const EmpiricalMeasure inside = delta({1.5, 0.0});
  CHECK(annulus_coverage(inside, radii, 0.1) == doctest::Approx(1.0));
  const EmpiricalMeasure outside = delta({2.4, 0.0});
  CHECK(annulus_coverage(outside, radii, 0.1) == doctest::Approx(0.0));
  const EmpiricalMeasure half({{cplx{1.5, 0.0}, 0.5}, {cplx{9.0, 0.0}, 0.5}});
  CHECK(annulus_coverage(half, radii, 0.1) == doctest::Approx(0.5));
}

TEST_CASE("quantile discretizations converge in LP distance") {
  const auto law = SpectralLaw::uniform_interval(1.0, 2.0);
  const auto fine = law.discretize(4096);
  double previous = 1.0;
  for (std::size_t d : {8, 16, 32, 64}) {
    const auto mu = law.discretize(d);
    const double dist = levy_prokhorov(mu, fine, 1e-5);
    CHECK(dist <= 2.0 / static_cast<double>(d));
    CHECK(dist <= previous + 1e-3);
    previous = dist;
  }
}

TEST_CASE("measure JSON round trip") {
  const EmpiricalMeasure mu({{cplx{0.5, -0.25}, 0.75}, {cplx{1, 1}, 0.25}});
  const auto back = measure_from_json(measure_to_json(mu));
  REQUIRE(back.size() == 2);
  CHECK(back.atoms()[0].location == mu.atoms()[0].location);
  CHECK(back.atoms()[1].weight == mu.atoms()[1].weight);
}

TEST_CASE("measure constructor validates weights") {
  CHECK_THROWS_AS(EmpiricalMeasure({{cplx{0, 0}, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure({{cplx{0, 0}, -1.0}, {cplx{1, 0}, 2.0}}),
                  std::invalid_argument);
}

}  // TEST_SUITE
