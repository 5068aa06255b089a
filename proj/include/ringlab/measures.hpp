#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ringlab/matrix.hpp"

namespace ringlab {

struct WeightedAtom {
  cplx location{0.0, 0.0};
  double weight = 0.0;
};

// Finitely supported probability measure on C. Weights are positive and sum
// to 1 within 1e-12; locations are finite.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<WeightedAtom> atoms);

  static EmpiricalMeasure uniform(const std::vector<cplx>& points);
  static EmpiricalMeasure uniform_real(const std::vector<double>& points);

  const std::vector<WeightedAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<WeightedAtom> atoms_;
};

// Uniform measure on the eigenvalues of a (weight 1/d each).
EmpiricalMeasure empirical_eigenvalues(const Matrix& a,
                                       const std::string& context = {});

// Uniform measure on the singular values of a, as atoms on the real axis.
EmpiricalMeasure empirical_singulars(const Matrix& a,
                                     const std::string& context = {});

// Levy-Prokhorov distance between finite atomic measures, accurate to
// +-tol. Feasibility of each epsilon is decided by max-flow on the
// epsilon-closeness bipartite graph (Strassen duality for the finite case);
// the search brackets [0, 1]. Inputs whose atom-count product exceeds
// pair_cap are refused (callers should subsample).
double levy_prokhorov(const EmpiricalMeasure& alpha,
                      const EmpiricalMeasure& beta, double tol = 1e-4,
                      std::size_t pair_cap = std::size_t{1} << 22);

// Inner and outer radii of the limiting single-ring support.
struct RingRadii {
  double r_minus = 0.0;
  double r_plus = 0.0;
};

// Radii from the second and inverse-second moments of an atomic singular
// law: r_plus = (sum w |x|^2)^{1/2}, r_minus = (sum w |x|^-2)^{-1/2}.
// Any atom at 0 is a domain error.
RingRadii ring_radii(const EmpiricalMeasure& mu);

// Total weight of atoms whose modulus lies in [r_minus - delta,
// r_plus + delta].
double annulus_coverage(const EmpiricalMeasure& measure, RingRadii radii,
                        double delta);

// JSON interchange: {"atoms": [[re, im, weight], ...]}.
std::string measure_to_json(const EmpiricalMeasure& m);
EmpiricalMeasure measure_from_json(const std::string& text);

}  // namespace ringlab
