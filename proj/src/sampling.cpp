#include "ringlab/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"

namespace ringlab {

const char* group_name(Group g) {
  switch (g) {
    case Group::U:
      return "U";
    case Group::O:
      return "O";
    case Group::SU:
      return "SU";
    case Group::SO:
      return "SO";
  }
  return "?";
}

Group parse_group(const std::string& name) {
  if (name == "U") return Group::U;
  if (name == "O") return Group::O;
  if (name == "SU") return Group::SU;
  if (name == "SO") return Group::SO;
  throw config_error("unknown group '" + name + "' (expected U, O, SU, SO)");
}

double frame_residual(const GrassmannFrame& f) {
  double residual = 0.0;
  for (std::size_t a = 0; a < f.k; ++a)
    for (std::size_t b = 0; b < f.k; ++b) {
      cplx dot{0.0, 0.0};
      for (std::size_t i = 0; i < f.dim; ++i)
        dot += std::conj(f.at(i, a)) * f.at(i, b);
      const cplx expect = (a == b) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      residual = std::max(residual, std::abs(dot - expect));
    }
  return residual;
}

Matrix sample_ginibre(std::size_t d, Field field, RandomStream& rng) {
  if (d == 0) throw std::invalid_argument("ginibre: d must be >= 1");
  Matrix g(d, field);
  // Column-major fill order is part of the stream contract.
  for (auto& z : g.data())
    z = (field == Field::Complex) ? rng.gaussian_complex()
                                  : cplx{rng.gaussian(), 0.0};
  return g;
}

Matrix sample_haar(Group group, std::size_t d, RandomStream& rng) {
  const Field field = group_field(group);
  // Rank deficiency is a probability-zero resample signal.
  Matrix q;
  for (int attempt = 0;; ++attempt) {
    try {
      q = qr_unitary(sample_ginibre(d, field, rng));
      break;
    } catch (const rank_deficient_error&) {
      if (attempt >= 8)
        throw numerical_error("haar sampling failed repeatedly");
    }
  }
  if (group == Group::SU) {
    // Multiply the final column by conj(det Q): a measurable retraction
    // U(d) -> SU(d) commuting with left translation, so Haar is preserved.
    const cplx phase = lu_logdet(q).phase;
    for (std::size_t i = 0; i < d; ++i) q(i, d - 1) *= std::conj(phase);
  } else if (group == Group::SO) {
    const double sign = lu_logdet(q).phase.real();
    if (sign < 0)
      for (std::size_t i = 0; i < d; ++i) q(i, d - 1) = -q(i, d - 1);
  }
  return q;
}

std::vector<double> sample_sphere(std::size_t n, RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("sphere: n must be >= 1");
  std::vector<double> v(n);
  for (int attempt = 0; attempt < 16; ++attempt) {
    double norm_sq = 0.0;
    for (auto& x : v) {
      x = rng.gaussian();
      norm_sq += x * x;
    }
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& x : v) x *= inv;
      return v;
    }
  }
  throw numerical_error("sphere sampling drew the zero vector repeatedly");
}

std::vector<cplx> sample_sphere_complex(std::size_t d, RandomStream& rng) {
  if (d == 0) throw std::invalid_argument("sphere: d must be >= 1");
  std::vector<cplx> v(d);
  for (int attempt = 0; attempt < 16; ++attempt) {
    double norm_sq = 0.0;
    for (auto& z : v) {
      z = rng.gaussian_complex();
      norm_sq += std::norm(z);
    }
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& z : v) z *= inv;
      return v;
    }
  }
  throw numerical_error("sphere sampling drew the zero vector repeatedly");
}

GrassmannFrame sample_grassmann_frame(std::size_t d, std::size_t k,
                                      Field field, RandomStream& rng) {
  if (k == 0 || k > d)
    throw std::invalid_argument("grassmann frame: need 1 <= k <= d");
  const Matrix u =
      sample_haar(field == Field::Real ? Group::O : Group::U, d, rng);
  GrassmannFrame f{d, k, field, std::vector<cplx>(d * k)};
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < d; ++i) f.at(i, j) = u(i, j);
  return f;
}

cplx trace(const Matrix& m) {
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

Matrix sample_ginibre(std::size_t d, Field field, SeedSpec seed) {
  RandomStream rng(seed);
  return sample_ginibre(d, field, rng);
}

Matrix sample_haar(Group group, std::size_t d, SeedSpec seed) {
  RandomStream rng(seed);
  return sample_haar(group, d, rng);
}

std::vector<double> sample_sphere(std::size_t n, SeedSpec seed) {
  RandomStream rng(seed);
  return sample_sphere(n, rng);
}

std::vector<cplx> sample_sphere_complex(std::size_t d, SeedSpec seed) {
  RandomStream rng(seed);
  return sample_sphere_complex(d, rng);
}

GrassmannFrame sample_grassmann_frame(std::size_t d, std::size_t k,
                                      Field field, SeedSpec seed) {
  RandomStream rng(seed);
  return sample_grassmann_frame(d, k, field, rng);
}

}  // namespace ringlab
