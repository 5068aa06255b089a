#include "ringlab/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"
#include "ringlab/sweep.hpp"

namespace ringlab {

namespace {

std::string seed_context(const char* what, SeedSpec seed) {
  return std::string(what) + " master_seed=" +
         std::to_string(seed.master_seed) +
         " trial_index=" + std::to_string(seed.trial_index);
}

MCEstimate estimate_from(const std::vector<double>& values) {
  return chunked_stats(values).estimate();
}

bool is_diagonal(const Matrix& a) {
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (std::size_t i = 0; i < a.dim(); ++i)
      if (i != j && a(i, j) != cplx{0.0, 0.0}) return false;
  return true;
}

}  // namespace

double log_top_eigs(const Matrix& m, std::size_t k,
                    const std::string& context) {
  if (k == 0 || k > m.dim())
    throw std::invalid_argument("log_top_eigs: need 1 <= k <= d");
  const auto ev = eigenvalues(m, context);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double mod = std::abs(ev[i]);
    if (mod == 0.0)
      throw numerical_error("log_top_eigs: zero eigenvalue in the top k",
                            context);
    sum += std::log(mod);
  }
  if (!std::isfinite(sum))
    throw numerical_error("log_top_eigs: non-finite sum", context);
  return sum;
}

Distortion grassmann_distortion(const Matrix& a, const GrassmannFrame& frame,
                                const std::string& context) {
  if (frame.dim != a.dim())
    throw std::invalid_argument("grassmann_distortion: dimension mismatch");
  const std::size_t d = a.dim(), k = frame.k;
  std::vector<cplx> b(d * k);  // B = A U_k
  for (std::size_t j = 0; j < k; ++j) {
    const auto col =
        matvec(a, std::span<const cplx>(frame.columns.data() + j * d, d));
    std::copy(col.begin(), col.end(), b.begin() + j * d);
  }
  const double log_volume = log_volume_of_columns(b, d, k, context);
  return {log_volume, std::exp(log_volume), std::exp(2.0 * log_volume)};
}

namespace {

// Exact up to C(60, 30) in 64-bit arithmetic.
std::uint64_t binomial_exact(std::size_t d, std::size_t k) {
  std::uint64_t c = 1;
  const std::size_t kk = std::min(k, d - k);
  for (std::size_t i = 1; i <= kk; ++i) c = c * (d - kk + i) / i;
  return c;
}

}  // namespace

double log_binomial(std::size_t d, std::size_t k) {
  if (k > d) throw std::invalid_argument("binomial: k <= d required");
  if (d <= 60) return std::log(static_cast<double>(binomial_exact(d, k)));
  return std::lgamma(static_cast<double>(d) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(d - k) + 1.0);
}

double armentano_floor(std::size_t d, std::size_t k) {
  if (k > d) throw std::invalid_argument("binomial: k <= d required");
  if (d <= 60) return 1.0 / static_cast<double>(binomial_exact(d, k));
  return std::exp(-log_binomial(d, k));
}

MCEstimate estimate_lhs(const Matrix& a, Group group, std::size_t k,
                        std::uint64_t n, SeedSpec seed) {
  if (n < 2) throw std::invalid_argument("estimate_lhs: n >= 2");
  if (k == 0 || k > a.dim())
    throw std::invalid_argument("estimate_lhs: need 1 <= k <= d");
  const auto values = run_indexed(n, [&](std::size_t j) {
    const SeedSpec sub = seed.child(j);
    const Matrix u = sample_haar(group, a.dim(), sub);
    return log_top_eigs(matmul(u, a), k, seed_context("lhs sample", sub));
  });
  return estimate_from(values);
}

MCEstimate estimate_rhs(const Matrix& a, std::size_t k, std::uint64_t n,
                        SeedSpec seed, Field frame_field) {
  if (n < 2) throw std::invalid_argument("estimate_rhs: n >= 2");
  if (k == 0 || k > a.dim())
    throw std::invalid_argument("estimate_rhs: need 1 <= k <= d");
  const auto values = run_indexed(n, [&](std::size_t j) {
    const SeedSpec sub = seed.child(j);
    const auto frame = sample_grassmann_frame(a.dim(), k, frame_field, sub);
    return grassmann_distortion(a, frame, seed_context("rhs sample", sub))
        .log_volume;
  });
  return estimate_from(values);
}

ConjectureReport conjecture_report(const Matrix& a, Group group,
                                   std::size_t k, std::uint64_t n,
                                   SeedSpec seed, double se_factor) {
  ConjectureReport report;
  report.d = a.dim();
  report.k = k;
  report.se_factor = se_factor;
  report.lhs = estimate_lhs(a, group, k, n, seed.child(0));
  report.rhs = estimate_rhs(a, k, n, seed.child(1), group_field(group));
  report.log_floor = -log_binomial(report.d, k);
  report.floor_c = armentano_floor(report.d, k);

  const double lhs_se = report.lhs.std_error();
  const double rhs_se = report.rhs.std_error();
  report.c_hat_defined = std::abs(report.rhs.mean) > se_factor * rhs_se;
  if (report.c_hat_defined) report.c_hat = report.lhs.mean / report.rhs.mean;

  const double floor_se =
      std::sqrt(lhs_se * lhs_se +
                report.floor_c * report.floor_c * rhs_se * rhs_se);
  report.floor_pass = report.lhs.mean >=
                      report.floor_c * report.rhs.mean - se_factor * floor_se;
  const double unit_se = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
  report.unit_pass = report.lhs.mean >= report.rhs.mean - se_factor * unit_se;
  return report;
}

ConcentrationStats sphere_pushforward_stats(const Matrix& a, std::uint64_t n,
                                            SeedSpec seed, Field sphere_field,
                                            ConcentrationOptions opts) {
  if (n < 2) throw std::invalid_argument("sphere stats: n >= 2");
  const std::size_t d = a.dim();
  ConcentrationStats stats;
  stats.sphere_field = sphere_field;
  stats.sphere_real_dim = sphere_field == Field::Real ? d : 2 * d;
  stats.c_ref = opts.c_ref;

  const double sigma1 = singular_values(a).front();
  stats.lipschitz_L = 2.0 * sigma1 * sigma1;

  const bool diagonal = is_diagonal(a);

  // ||A v||^2 per sample; the norm is its exact square root.
  const auto sq_values = run_indexed(n, [&](std::size_t j) {
    RandomStream rng(seed.child(j));
    double sq = 0.0;
    if (sphere_field == Field::Real) {
      const auto v = sample_sphere(d, rng);
      if (diagonal) {
        for (std::size_t i = 0; i < d; ++i)
          sq += std::norm(a(i, i)) * v[i] * v[i];
      } else {
        std::vector<cplx> vz(d);
        for (std::size_t i = 0; i < d; ++i) vz[i] = {v[i], 0.0};
        for (const auto& w : matvec(a, vz)) sq += std::norm(w);
      }
    } else {
      const auto v = sample_sphere_complex(d, rng);
      if (diagonal) {
        for (std::size_t i = 0; i < d; ++i)
          sq += std::norm(a(i, i)) * std::norm(v[i]);
      } else {
        for (const auto& w : matvec(a, v)) sq += std::norm(w);
      }
    }
    return sq;
  });

  std::vector<double> norm_values(sq_values.size());
  std::vector<double> log_values(sq_values.size());
  for (std::size_t i = 0; i < sq_values.size(); ++i) {
    norm_values[i] = std::sqrt(sq_values[i]);
    log_values[i] = 0.5 * std::log(sq_values[i]);
  }

  stats.norm_sq = estimate_from(sq_values);
  stats.norm = estimate_from(norm_values);
  stats.log_norm = estimate_from(log_values);
  stats.norm_sq_median = median(sq_values);
  stats.norm_median = median(norm_values);

  const double sd = std::sqrt(stats.norm_sq.variance);
  const double eps_max = opts.eps_max > 0.0 ? opts.eps_max : 5.0 * sd;
  const std::size_t m = std::max<std::size_t>(opts.eps_points, 1);
  stats.eps_grid.resize(m);
  stats.tail_empirical.resize(m);
  stats.tail_reference.resize(m);
  const double real_dim = static_cast<double>(stats.sphere_real_dim);
  const double l2 = stats.lipschitz_L * stats.lipschitz_L;
  for (std::size_t i = 0; i < m; ++i) {
    const double eps =
        eps_max * static_cast<double>(i + 1) / static_cast<double>(m);
    stats.eps_grid[i] = eps;
    std::uint64_t count = 0;
    for (double sq : sq_values)
      if (std::abs(sq - stats.norm_sq.mean) >= eps) ++count;
    stats.tail_empirical[i] =
        static_cast<double>(count) / static_cast<double>(n);
    stats.tail_reference[i] =
        2.0 * std::exp(-opts.c_ref * real_dim * eps * eps / l2);
  }

  // Fit c in 2 exp(-c n eps^2 / L^2) through the nonzero empirical tails.
  double sxy = 0.0, sxx = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = stats.tail_empirical[i];
    if (p <= 0.0) continue;
    const double x = real_dim * stats.eps_grid[i] * stats.eps_grid[i] / l2;
    const double y = std::log(p / 2.0);
    sxy += x * y;
    sxx += x * x;
    any = true;
  }
  stats.c_fitted = (any && sxx > 0.0)
                       ? -sxy / sxx
                       : std::numeric_limits<double>::quiet_NaN();
  return stats;
}

SingleRingTrial single_ring_trial(const SpectralLaw& law, std::size_t d,
                                  Group group, RotationSpec rotation,
                                  SeedSpec seed, double delta,
                                  const SingleRingOptions& opts) {
  if (d < 2) throw std::invalid_argument("single ring trial: d >= 2");
  if (delta < 0.0) throw std::invalid_argument("single ring trial: delta >= 0");

  // All randomness hangs off (seed, d), so a record reproduces from its own
  // row: same master seed, trial index, and d give the same output.
  const SeedSpec base = seed.child(d);
  Matrix a = opts.iid_construction ? iid_matrix(law, d, base.child(4))
                                   : quantile_matrix(law, d);
  if (rotation.two_sided) a = rotate_ensemble(a, rotation, base.child(1));
  const Matrix u = sample_haar(group, d, base.child(0));

  const std::string ctx =
      seed_context("single-ring trial", seed) + " d=" + std::to_string(d);
  const auto cloud = eigenvalues(matmul(u, a), ctx);
  const auto measure = EmpiricalMeasure::uniform(cloud);
  const RingRadii radii = ring_radii(law);

  // Support-level reference: rotationally invariant, radius uniform on
  // [r_minus, r_plus], discretized at polar cell midpoints. The limit law's
  // radial density is out of scope, so this is a support diagnostic only.
  std::vector<cplx> ref;
  ref.reserve(opts.ref_radii * opts.ref_angles);
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  for (std::size_t ri = 0; ri < opts.ref_radii; ++ri) {
    const double r = radii.r_minus + (radii.r_plus - radii.r_minus) *
                                         (static_cast<double>(ri) + 0.5) /
                                         static_cast<double>(opts.ref_radii);
    for (std::size_t ai = 0; ai < opts.ref_angles; ++ai) {
      const double theta = kTwoPi * (static_cast<double>(ai) + 0.5) /
                           static_cast<double>(opts.ref_angles);
      ref.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }

  SingleRingTrial out;
  out.cloud = cloud;
  out.record.d = d;
  out.record.group = group;
  out.record.law = law.literal();
  out.record.master_seed = seed.master_seed;
  out.record.trial_index = seed.trial_index;
  out.record.rho = std::abs(cloud.front());
  out.record.r_plus_target = radii.r_plus;
  out.record.r_minus_target = radii.r_minus;
  out.record.annulus_coverage = annulus_coverage(measure, radii, delta);
  out.record.lp_distance = levy_prokhorov(
      measure, EmpiricalMeasure::uniform(ref), opts.lp_tol, opts.lp_pair_cap);
  return out;
}

}  // namespace ringlab
