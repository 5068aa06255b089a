// Test-side oracles, deliberately independent of the library's
// LAPACK-backed implementation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ringlab/matrix.hpp"
#include "ringlab/measures.hpp"
#include "ringlab/rng.hpp"

namespace oracles {

using ringlab::cplx;

// log|det| by hand-rolled LU with partial pivoting.
inline double lu_log_abs_det(const ringlab::Matrix& m) {
  const std::size_t d = m.dim();
  std::vector<cplx> a(m.data().begin(), m.data().end());
  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i + j * d]; };
  double log_abs = 0.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < d; ++i)
      if (std::abs(at(i, col)) > std::abs(at(pivot, col))) pivot = i;
    if (std::abs(at(pivot, col)) == 0.0)
      return -std::numeric_limits<double>::infinity();
    if (pivot != col)
      for (std::size_t j = 0; j < d; ++j) std::swap(at(pivot, j), at(col, j));
    log_abs += std::log(std::abs(at(col, col)));
    for (std::size_t i = col + 1; i < d; ++i) {
      const cplx f = at(i, col) / at(col, col);
      for (std::size_t j = col + 1; j < d; ++j) at(i, j) -= f * at(col, j);
    }
  }
  return log_abs;
}

// Levy-Prokhorov by exhaustive subset feasibility plus bisection; usable up
// to ~12 atoms per side.
inline double levy_prokhorov_bruteforce(const ringlab::EmpiricalMeasure& alpha,
                                        const ringlab::EmpiricalMeasure& beta,
                                        double tol = 1e-6) {
  const auto& a = alpha.atoms();
  const auto& b = beta.atoms();

  // one direction: for every subset C of target's atoms,
  // target(C) <= source(C^eps) + eps
  auto direction_ok = [](const std::vector<ringlab::WeightedAtom>& source,
                         const std::vector<ringlab::WeightedAtom>& target,
                         double eps) {
    const std::size_t m = target.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      double target_mass = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        if (mask & (std::size_t{1} << j)) target_mass += target[j].weight;
      double fattened = 0.0;
      for (const auto& s : source) {
        bool near = false;
        for (std::size_t j = 0; j < m && !near; ++j)
          if ((mask & (std::size_t{1} << j)) &&
              std::abs(s.location - target[j].location) <= eps)
            near = true;
        if (near) fattened += s.weight;
      }
      if (target_mass > fattened + eps + 1e-12) return false;
    }
    return true;
  };

  auto feasible = [&](double eps) {
    return direction_ok(a, b, eps) && direction_ok(b, a, eps);
  };

  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 0.5 * tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Random small atomic measure in the unit square.
inline ringlab::EmpiricalMeasure random_measure(ringlab::RandomStream& rng,
                                                std::size_t max_atoms = 6) {
  const std::size_t n =
      1 + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(max_atoms));
  std::vector<ringlab::WeightedAtom> atoms(std::min(n, max_atoms));
  double total = 0.0;
  for (auto& a : atoms) {
    a.location = {rng.uniform01(), rng.uniform01()};
    a.weight = 0.05 + rng.uniform01();
    total += a.weight;
  }
  for (auto& a : atoms) a.weight /= total;
  // renormalize exactly enough for the constructor
  double sum = 0.0;
  for (const auto& a : atoms) sum += a.weight;
  atoms.back().weight += 1.0 - sum;
  return ringlab::EmpiricalMeasure(atoms);
}

// Midpoint-rule quadrature of f over [0, 2*pi), normalized by 1/(2*pi).
inline double circle_quadrature(const std::function<double(double)>& f,
                                std::size_t points = 200000) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  double sum = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double theta =
        two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    sum += f(theta);
  }
  return sum / static_cast<double>(points);
}

}  // namespace oracles
