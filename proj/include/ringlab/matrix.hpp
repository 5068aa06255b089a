#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ringlab {

using cplx = std::complex<double>;

enum class Field { Real, Complex };

inline const char* field_name(Field f) {
  return f == Field::Real ? "real" : "complex";
}

// Dense square matrix in complex column-major storage. Real matrices ride in
// the same storage with imaginary parts exactly zero.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t dim, Field field)
      : dim_(dim), field_(field), entries_(dim * dim, cplx{0.0, 0.0}) {}

  static Matrix identity(std::size_t dim, Field field = Field::Real) {
    Matrix m(dim, field);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> values) {
    Matrix m(values.size(), Field::Real);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static Matrix diagonal(std::span<const cplx> values) {
    Matrix m(values.size(), Field::Complex);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  std::size_t dim() const { return dim_; }
  Field field() const { return field_; }
  void set_field(Field f) { field_ = f; }

  cplx& operator()(std::size_t i, std::size_t j) {
    return entries_[i + j * dim_];
  }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return entries_[i + j * dim_];
  }

  std::span<cplx> data() { return entries_; }
  std::span<const cplx> data() const { return entries_; }

  bool finite() const {
    for (const auto& z : entries_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  // Checks the Real-field invariant: every imaginary part exactly zero.
  bool real_invariant_holds() const {
    if (field_ != Field::Real) return true;
    for (const auto& z : entries_)
      if (z.imag() != 0.0) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : entries_) s += std::norm(z);
    return std::sqrt(s);
  }

  Matrix scaled(cplx c) const {
    Matrix out = *this;
    for (auto& z : out.entries_) z *= c;
    if (c.imag() != 0.0) out.field_ = Field::Complex;
    return out;
  }

  Matrix adjoint() const {
    Matrix out(dim_, field_);
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t i = 0; i < dim_; ++i)
        out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t dim_ = 0;
  Field field_ = Field::Complex;
  std::vector<cplx> entries_;
};

// JSON interchange:
//   {"dim": d, "field": "real"|"complex", "re": [row-major d^2],
//    "im": [row-major d^2, absent for real]}
std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const std::string& text);

}  // namespace ringlab
