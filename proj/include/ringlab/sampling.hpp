#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ringlab/matrix.hpp"
#include "ringlab/rng.hpp"

namespace ringlab {

// Compact matrix groups the experiments draw from.
enum class Group { U, O, SU, SO };

const char* group_name(Group g);
Group parse_group(const std::string& name);

inline Field group_field(Group g) {
  return (g == Group::O || g == Group::SO) ? Field::Real : Field::Complex;
}

// First k columns of a group element: a uniform point on Grass(d, k) in
// Stiefel coordinates. Columns are stored column-major (d x k).
struct GrassmannFrame {
  std::size_t dim = 0;
  std::size_t k = 0;
  Field field = Field::Complex;
  std::vector<cplx> columns;

  cplx& at(std::size_t i, std::size_t j) { return columns[i + j * dim]; }
  const cplx& at(std::size_t i, std::size_t j) const {
    return columns[i + j * dim];
  }
};

// ||U_k* U_k - I_k||_max.
double frame_residual(const GrassmannFrame& f);

// i.i.d. standard Gaussian entries; complex entries have independent
// re/im parts of variance 1/2 each.
Matrix sample_ginibre(std::size_t d, Field field, RandomStream& rng);
Matrix sample_ginibre(std::size_t d, Field field, SeedSpec seed);

// Haar-distributed group element: Ginibre + QR with the positive-diagonal-R
// phase correction, then the measurable retraction onto SU/SO.
Matrix sample_haar(Group group, std::size_t d, RandomStream& rng);
Matrix sample_haar(Group group, std::size_t d, SeedSpec seed);

// Uniform point on the unit sphere S^{n-1} in R^n.
std::vector<double> sample_sphere(std::size_t n, RandomStream& rng);
std::vector<double> sample_sphere(std::size_t n, SeedSpec seed);

// Uniform point on S^{2d-1} realized as a unit vector in C^d.
std::vector<cplx> sample_sphere_complex(std::size_t d, RandomStream& rng);
std::vector<cplx> sample_sphere_complex(std::size_t d, SeedSpec seed);

// Uniform Grassmann frame: first k columns of Haar U(d) (complex) or
// O(d) (real).
GrassmannFrame sample_grassmann_frame(std::size_t d, std::size_t k,
                                      Field field, RandomStream& rng);
GrassmannFrame sample_grassmann_frame(std::size_t d, std::size_t k,
                                      Field field, SeedSpec seed);

cplx trace(const Matrix& m);

}  // namespace ringlab
