#pragma once

#include <string>
#include <vector>

#include "ringlab/matrix.hpp"

namespace ringlab {

// Eigenvalues and singular values of one matrix, both sorted descending.
struct Spectrum {
  std::vector<cplx> eigenvalues;  // by descending modulus
  std::vector<double> singulars;  // descending
};

// Eigenvalues with multiplicity, sorted by descending modulus (ties broken
// by real then imaginary part). Backward-stable dense solver (balancing +
// Hessenberg + shifted QR). `context` is carried into any failure report.
std::vector<cplx> eigenvalues(const Matrix& a, const std::string& context = {});

// Singular values, descending.
std::vector<double> singular_values(const Matrix& a,
                                    const std::string& context = {});

// max_i |lambda_i(a)|.
double spectral_radius(const Matrix& a, const std::string& context = {});

Spectrum spectrum(const Matrix& a, const std::string& context = {});

// Unitary Q from the QR factorization of g, with the phase convention that
// diag(R) is real positive. Throws rank_deficient_error when some |R_jj|
// underflows (resample signal for Haar sampling).
Matrix qr_unitary(const Matrix& g);

// Determinant in log form: det = exp(log_abs) * phase, |phase| = 1.
// Computed by LU with partial pivoting; the phase stays exactly on the unit
// circle, so it is usable at any dimension without overflow.
struct LogDet {
  double log_abs = 0.0;
  cplx phase = 1.0;

  cplx value() const { return std::exp(log_abs) * phase; }
};
LogDet lu_logdet(const Matrix& a, const std::string& context = {});

Matrix matmul(const Matrix& a, const Matrix& b);

std::vector<cplx> matvec(const Matrix& a, std::span<const cplx> v);

// Sum of log|R_ii| over the QR factorization of a rows x cols column block
// (column-major): the log cols-volume of the parallelepiped spanned by the
// columns. Throws numerical_error when the block is rank deficient.
double log_volume_of_columns(std::span<const cplx> block, std::size_t rows,
                             std::size_t cols, const std::string& context = {});

// Solves a x = b for square a.
Matrix solve(const Matrix& a, const Matrix& b,
             const std::string& context = {});

// ||u* u - I||_max; small for unitary u.
double unitarity_residual(const Matrix& u);

}  // namespace ringlab
