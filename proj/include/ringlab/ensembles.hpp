#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ringlab/matrix.hpp"
#include "ringlab/measures.hpp"
#include "ringlab/rng.hpp"
#include "ringlab/sampling.hpp"

namespace ringlab {

// Target singular-value law with closed-form moments and quantiles.
// Support is bounded away from 0 and infinity and contains more than one
// point, so the single-ring hypotheses hold with C = bound_C().
class SpectralLaw {
 public:
  enum class Kind { TwoAtom, UniformInterval, FiniteAtoms };

  static SpectralLaw two_atom(double a, double b, double p = 0.5);
  static SpectralLaw uniform_interval(double a, double b);
  static SpectralLaw finite_atoms(
      std::vector<std::pair<double, double>> atom_weights);

  // Literals: "two-atom:a,b[,p]", "uniform:a,b", "atoms:x1:w1,x2:w2,...".
  static SpectralLaw parse(const std::string& literal);
  std::string literal() const;

  Kind kind() const { return kind_; }

  double quantile(double q) const;  // generalized inverse CDF
  double second_moment() const;
  double inverse_second_moment() const;
  double support_min() const;
  double support_max() const;
  double bound_C() const;  // max(support_max, 1/support_min)

  // n-point quantile discretization (atoms at F^{-1}((i-1/2)/n)).
  EmpiricalMeasure discretize(std::size_t n) const;

 private:
  SpectralLaw() = default;

  Kind kind_ = Kind::TwoAtom;
  // TwoAtom / UniformInterval use lo_/hi_ (+ p_ = mass at lo for TwoAtom);
  // FiniteAtoms uses atoms_ sorted by location with normalized weights.
  double lo_ = 0.0, hi_ = 0.0, p_ = 0.5;
  std::vector<std::pair<double, double>> atoms_;
};

RingRadii ring_radii(const SpectralLaw& law);

// Deterministic diagonal matrix with entries F^{-1}((i - 1/2)/d), i = 1..d:
// its empirical singular law converges to the target at rate O(1/d).
Matrix quantile_matrix(const SpectralLaw& law, std::size_t d);

// Robustness variant: diagonal of d i.i.d. draws from the law (inverse-CDF
// sampling), sorted ascending. Converges to the target only at the slower
// Monte Carlo rate.
Matrix iid_matrix(const SpectralLaw& law, std::size_t d, RandomStream& rng);
Matrix iid_matrix(const SpectralLaw& law, std::size_t d, SeedSpec seed);

struct RotationSpec {
  bool two_sided = false;
  Group group = Group::U;
};

// W A V for independent Haar W, V (or A unchanged when not two-sided);
// the singular values are untouched.
Matrix rotate_ensemble(const Matrix& a, RotationSpec rotation,
                       RandomStream& rng);
Matrix rotate_ensemble(const Matrix& a, RotationSpec rotation, SeedSpec seed);

struct ConditionCheck {
  bool ok = false;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  std::string diagnostic;

  explicit operator bool() const { return ok; }
};

// True iff sigma_min(a) >= 1/C and sigma_max(a) <= C.
ConditionCheck condition_check(const Matrix& a, double C);

}  // namespace ringlab
