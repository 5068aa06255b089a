#include "ringlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "ringlab/error.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cblas.h>

namespace ringlab {

namespace {

void require_square_finite(const Matrix& a, const std::string& context) {
  if (a.dim() == 0) throw std::invalid_argument("matrix has dimension 0");
  if (!a.finite())
    throw numerical_error("matrix has non-finite entries", context);
}

void sort_descending_modulus(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    return std::tuple(std::abs(a), a.real(), a.imag()) >
           std::tuple(std::abs(b), b.real(), b.imag());
  });
}

}  // namespace

std::vector<cplx> eigenvalues(const Matrix& a, const std::string& context) {
  require_square_finite(a, context);
  const auto n = static_cast<lapack_int>(a.dim());
  Matrix work = a;
  std::vector<cplx> w(a.dim());
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data().data(), n,
                    w.data(), nullptr, 1, nullptr, 1);
  if (info > 0)
    throw numerical_error(
        "eigenvalue QR iteration failed to converge (zgeev info=" +
            std::to_string(info) + ")",
        context);
  if (info < 0)
    throw numerical_error("zgeev rejected argument " + std::to_string(-info),
                          context);
  sort_descending_modulus(w);
  return w;
}

std::vector<double> singular_values(const Matrix& a,
                                    const std::string& context) {
  require_square_finite(a, context);
  const auto n = static_cast<lapack_int>(a.dim());
  Matrix work = a;
  std::vector<double> s(a.dim());
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, work.data().data(), n,
                     s.data(), nullptr, 1, nullptr, 1);
  if (info > 0)
    throw numerical_error("SVD failed to converge (zgesdd info=" +
                              std::to_string(info) + ")",
                          context);
  if (info < 0)
    throw numerical_error("zgesdd rejected argument " + std::to_string(-info),
                          context);
  return s;  // LAPACK returns descending order
}

double spectral_radius(const Matrix& a, const std::string& context) {
  const auto w = eigenvalues(a, context);
  return std::abs(w.front());
}

Spectrum spectrum(const Matrix& a, const std::string& context) {
  return {eigenvalues(a, context), singular_values(a, context)};
}

Matrix qr_unitary(const Matrix& g) {
  require_square_finite(g, {});
  const auto d = g.dim();
  const auto n = static_cast<lapack_int>(d);
  constexpr double kRankTol = 1e-300;

  if (g.field() == Field::Real) {
    // Real path keeps imaginary parts exactly zero.
    std::vector<double> a(d * d);
    for (std::size_t i = 0; i < d * d; ++i) a[i] = g.data()[i].real();
    std::vector<double> tau(d);
    lapack_int info =
        LAPACKE_dgeqrf(LAPACK_COL_MAJOR, n, n, a.data(), n, tau.data());
    if (info != 0)
      throw numerical_error("dgeqrf failed (info=" + std::to_string(info) +
                            ")");
    std::vector<double> rdiag(d);
    for (std::size_t j = 0; j < d; ++j) rdiag[j] = a[j + j * d];
    info = LAPACKE_dorgqr(LAPACK_COL_MAJOR, n, n, n, a.data(), n, tau.data());
    if (info != 0)
      throw numerical_error("dorgqr failed (info=" + std::to_string(info) +
                            ")");
    Matrix q(d, Field::Real);
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(rdiag[j]) < kRankTol)
        throw rank_deficient_error("rank-deficient QR input (column " +
                                   std::to_string(j) + ")");
      const double sign = rdiag[j] < 0 ? -1.0 : 1.0;
      for (std::size_t i = 0; i < d; ++i) q(i, j) = sign * a[i + j * d];
    }
    return q;
  }

  Matrix a = g;
  std::vector<cplx> tau(d);
  lapack_int info =
      LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, n, a.data().data(), n, tau.data());
  if (info != 0)
    throw numerical_error("zgeqrf failed (info=" + std::to_string(info) + ")");
  std::vector<cplx> rdiag(d);
  for (std::size_t j = 0; j < d; ++j) rdiag[j] = a(j, j);
  info = LAPACKE_zungqr(LAPACK_COL_MAJOR, n, n, n, a.data().data(), n,
                        tau.data());
  if (info != 0)
    throw numerical_error("zungqr failed (info=" + std::to_string(info) + ")");
  // Column j absorbs the phase of R_jj, leaving diag(R) real positive.
  for (std::size_t j = 0; j < d; ++j) {
    const double mod = std::abs(rdiag[j]);
    if (mod < kRankTol)
      throw rank_deficient_error("rank-deficient QR input (column " +
                                 std::to_string(j) + ")");
    const cplx phase = rdiag[j] / mod;
    for (std::size_t i = 0; i < d; ++i) a(i, j) *= phase;
  }
  a.set_field(Field::Complex);
  return a;
}

LogDet lu_logdet(const Matrix& a, const std::string& context) {
  require_square_finite(a, context);
  const auto d = a.dim();
  const auto n = static_cast<lapack_int>(d);
  Matrix work = a;
  std::vector<lapack_int> ipiv(d);
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n,
                                         work.data().data(), n, ipiv.data());
  if (info < 0)
    throw numerical_error("zgetrf rejected argument " + std::to_string(-info),
                          context);
  LogDet result;
  if (info > 0) {  // exactly singular
    result.log_abs = -std::numeric_limits<double>::infinity();
    result.phase = 0.0;
    return result;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const cplx u = work(j, j);
    const double mod = std::abs(u);
    result.log_abs += std::log(mod);
    result.phase *= u / mod;
    if (ipiv[j] != static_cast<lapack_int>(j + 1)) result.phase = -result.phase;
  }
  return result;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("matmul dimension mismatch");
  const auto n = static_cast<blasint>(a.dim());
  const Field f = (a.field() == Field::Real && b.field() == Field::Real)
                      ? Field::Real
                      : Field::Complex;
  Matrix c(a.dim(), f);
  const cplx one{1.0, 0.0}, zero{0.0, 0.0};
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, &one,
              a.data().data(), n, b.data().data(), n, &zero, c.data().data(),
              n);
  return c;
}

std::vector<cplx> matvec(const Matrix& a, std::span<const cplx> v) {
  if (v.size() != a.dim()) throw std::invalid_argument("matvec size mismatch");
  const auto n = static_cast<blasint>(a.dim());
  std::vector<cplx> out(a.dim());
  const cplx one{1.0, 0.0}, zero{0.0, 0.0};
  cblas_zgemv(CblasColMajor, CblasNoTrans, n, n, &one, a.data().data(), n,
              v.data(), 1, &zero, out.data(), 1);
  return out;
}

double log_volume_of_columns(std::span<const cplx> block, std::size_t rows,
                             std::size_t cols, const std::string& context) {
  if (block.size() != rows * cols || cols == 0 || cols > rows)
    throw std::invalid_argument("log_volume_of_columns: bad block shape");
  std::vector<cplx> work(block.begin(), block.end());
  std::vector<cplx> tau(cols);
  const lapack_int info = LAPACKE_zgeqrf(
      LAPACK_COL_MAJOR, static_cast<lapack_int>(rows),
      static_cast<lapack_int>(cols), work.data(),
      static_cast<lapack_int>(rows), tau.data());
  if (info != 0)
    throw numerical_error("zgeqrf failed (info=" + std::to_string(info) + ")",
                          context);
  double log_volume = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    const double r = std::abs(work[j + j * rows]);
    if (r == 0.0)
      throw numerical_error("rank-deficient column block (zero volume)",
                            context);
    log_volume += std::log(r);
  }
  return log_volume;
}

Matrix solve(const Matrix& a, const Matrix& b, const std::string& context) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("solve dimension mismatch");
  require_square_finite(a, context);
  const auto n = static_cast<lapack_int>(a.dim());
  Matrix lu = a;
  Matrix x = b;
  std::vector<lapack_int> ipiv(a.dim());
  const lapack_int info =
      LAPACKE_zgesv(LAPACK_COL_MAJOR, n, n, lu.data().data(), n, ipiv.data(),
                    x.data().data(), n);
  if (info > 0) throw numerical_error("solve: matrix is singular", context);
  if (info < 0)
    throw numerical_error("zgesv rejected argument " + std::to_string(-info),
                          context);
  x.set_field((a.field() == Field::Real && b.field() == Field::Real)
                  ? Field::Real
                  : Field::Complex);
  return x;
}

double unitarity_residual(const Matrix& u) {
  const auto n = static_cast<blasint>(u.dim());
  Matrix prod(u.dim(), Field::Complex);
  const cplx one{1.0, 0.0}, zero{0.0, 0.0};
  cblas_zgemm(CblasColMajor, CblasConjTrans, CblasNoTrans, n, n, n, &one,
              u.data().data(), n, u.data().data(), n, &zero,
              prod.data().data(), n);
  double residual = 0.0;
  for (std::size_t j = 0; j < u.dim(); ++j)
    for (std::size_t i = 0; i < u.dim(); ++i) {
      const cplx expect = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      residual = std::max(residual, std::abs(prod(i, j) - expect));
    }
  return residual;
}

}  // namespace ringlab
