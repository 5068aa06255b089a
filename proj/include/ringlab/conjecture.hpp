#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ringlab/ensembles.hpp"
#include "ringlab/matrix.hpp"
#include "ringlab/measures.hpp"
#include "ringlab/rng.hpp"
#include "ringlab/sampling.hpp"
#include "ringlab/stats.hpp"

namespace ringlab {

// Sum of log-moduli of the k largest-modulus eigenvalues of m. The value is
// invariant under tie order at the k-th modulus. A zero eigenvalue among the
// top k is an error (the integrand needs an invertible matrix).
double log_top_eigs(const Matrix& m, std::size_t k,
                    const std::string& context = {});

// Volume distortion of a restricted to the span of an orthonormal frame.
// The canonical value is the k-volume scaling sqrt(det((A U_k)*(A U_k)));
// the raw Gram determinant is its square and is reported alongside so both
// readings of the conjecture can be checked. log_volume is the robust form.
struct Distortion {
  double log_volume = 0.0;
  double volume = 0.0;
  double gram_det = 0.0;
};
Distortion grassmann_distortion(const Matrix& a, const GrassmannFrame& frame,
                                const std::string& context = {});

// log binomial(d, k); exact integer arithmetic for d <= 60.
double log_binomial(std::size_t d, std::size_t k);
// 1/binomial(d, k).
double armentano_floor(std::size_t d, std::size_t k);

// Monte Carlo mean of log_top_eigs(U A, k) over n Haar samples of the group.
// Per-sample streams are derived from seed by index, so the estimate is
// independent of the thread schedule. Failed samples propagate with their
// seed context.
MCEstimate estimate_lhs(const Matrix& a, Group group, std::size_t k,
                        std::uint64_t n, SeedSpec seed);

// Monte Carlo mean of the log volume distortion over n uniform Grassmann
// frames (for k = 1 this is E log ||A v|| on the sphere).
MCEstimate estimate_rhs(const Matrix& a, std::size_t k, std::uint64_t n,
                        SeedSpec seed, Field frame_field);

struct ConjectureReport {
  std::size_t d = 0;
  std::size_t k = 0;
  MCEstimate lhs;  // E sum_{i<=k} log |lambda_i(U A)|
  MCEstimate rhs;  // E log volume distortion
  bool c_hat_defined = false;
  double c_hat = 0.0;        // lhs.mean / rhs.mean when defined
  double floor_c = 0.0;      // 1/binomial(d, k)
  double log_floor = 0.0;    // -log binomial(d, k)
  bool floor_pass = false;   // lhs >= floor * rhs - se_factor * combined SE
  bool unit_pass = false;    // lhs >= rhs - se_factor * combined SE
  double se_factor = 4.0;
};

// Both sides of the inequality plus the floor-constant and unit-constant
// verdicts at the given standard-error factor. The Grassmann frame field
// follows the group (SO/O real, SU/U complex).
ConjectureReport conjecture_report(const Matrix& a, Group group,
                                   std::size_t k, std::uint64_t n,
                                   SeedSpec seed, double se_factor = 4.0);

struct ConcentrationOptions {
  std::size_t eps_points = 20;
  double eps_max = 0.0;  // 0: five standard deviations of ||Av||^2
  double c_ref = 1.0;    // constant in the reference tail curve
};

struct ConcentrationStats {
  MCEstimate norm;      // ||A v||
  MCEstimate norm_sq;   // ||A v||^2
  MCEstimate log_norm;  // log ||A v||
  double norm_median = 0.0;
  double norm_sq_median = 0.0;
  double lipschitz_L = 0.0;        // 2 sigma_1(A)^2, for ||Av||^2
  Field sphere_field = Field::Complex;
  std::size_t sphere_real_dim = 0;  // ambient real dimension used
  std::vector<double> eps_grid;
  std::vector<double> tail_empirical;  // P(| ||Av||^2 - mean | >= eps)
  std::vector<double> tail_reference;  // 2 exp(-c_ref n eps^2 / L^2)
  double c_ref = 1.0;
  double c_fitted = 0.0;  // least-squares fit from nonzero tails; NaN if none
};

// Pushforward of the uniform sphere measure under v -> ||A v||. The sphere
// convention is explicit: Real uses S^{d-1} in R^d, Complex uses S^{2d-1}
// realized as unit vectors in C^d.
ConcentrationStats sphere_pushforward_stats(const Matrix& a, std::uint64_t n,
                                            SeedSpec seed, Field sphere_field,
                                            ConcentrationOptions opts = {});

// One CSV row of experiment output. Fields an experiment kind does not
// produce stay empty.
struct TrialRecord {
  std::string experiment_id;
  std::size_t d = 0;
  std::optional<std::size_t> k;
  std::optional<Group> group;
  std::string law;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
  std::optional<double> rho;
  std::optional<double> r_plus_target;
  std::optional<double> r_minus_target;
  std::optional<double> annulus_coverage;
  std::optional<double> lp_distance;
  std::optional<double> lhs_mean, lhs_se, rhs_mean, rhs_se;
  std::optional<double> c_hat;
  std::optional<double> floor_c;
  std::optional<std::int64_t> wall_time_ms;
};

struct SingleRingOptions {
  double lp_tol = 1e-3;
  std::size_t ref_radii = 16;   // reference discretization rings
  std::size_t ref_angles = 32;  // atoms per ring
  std::size_t lp_pair_cap = std::size_t{1} << 22;
  bool iid_construction = false;  // i.i.d. singular values instead of quantiles
};

struct SingleRingTrial {
  TrialRecord record;
  std::vector<cplx> cloud;  // eigenvalues of U A
};

// One single-ring trial: builds the quantile matrix (optionally two-sided
// rotated), draws Haar U, and reports the spectral radius, annulus coverage
// at the law's radii, and the LP distance to a fixed support-level
// discretization of the limit law (uniform-in-radius polar grid on the
// annulus; the limit's radial density is not known, so this column is a
// support diagnostic, not a density comparison).
SingleRingTrial single_ring_trial(const SpectralLaw& law, std::size_t d,
                                  Group group, RotationSpec rotation,
                                  SeedSpec seed, double delta,
                                  const SingleRingOptions& opts = {});

}  // namespace ringlab
