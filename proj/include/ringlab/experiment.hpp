#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ringlab/conjecture.hpp"
#include "ringlab/ensembles.hpp"
#include "ringlab/sampling.hpp"

namespace ringlab {

enum class ExperimentKind { SingleRing, Conjecture, Concentration, Sweep };

const char* kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

enum class OutputFormat { Csv, Json };

// Statistical pass thresholds; all configurable via the [checks] section.
struct CheckThresholds {
  double se_factor = 4.0;
  double rho_tol = 0.08;           // |rho - R_+| tolerance at the largest d
  double rho_quorum = 0.90;        // fraction of trials that must meet it
  double coverage_min = 0.99;      // annulus coverage per trial
  double coverage_quorum = 0.95;   // fraction of trials that must meet it
  double slope_min = -1.3;         // log-variance vs log-d regression window
  double slope_max = -0.7;
  bool decreasing_median = true;   // sweep: median |rho - R_+| decreasing
  bool unit_required = false;      // conjecture: unit_pass gates the exit code
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SingleRing;
  std::string id;                // defaults to the kind name
  std::string law_literal;       // required
  std::vector<std::size_t> dims; // required, each >= 2
  std::size_t k = 1;
  Group group = Group::SU;
  std::size_t trials = 1;
  std::uint64_t samples = 10000;
  std::uint64_t master_seed = 0;
  bool seed_set = false;         // wall-clock seeding is refused
  double delta = 0.1;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::Csv;
  Field sphere_field = Field::Complex;  // sphere convention, reported as used
  bool rotate = false;           // two-sided Haar rotation of the ensemble
  Group rotate_group = Group::U;
  bool iid_construction = false; // i.i.d. singular values instead of quantiles
  double lp_tol = 1e-3;
  double levy_c = 1.0;           // constant in the reference tail curve
  bool timings = false;          // real wall_time_ms breaks byte-identical CSV
  CheckThresholds checks;

  SpectralLaw law() const { return SpectralLaw::parse(law_literal); }
};

// Parses a flat key = value document ('#' comment lines, one optional
// [checks] section). Unknown keys and duplicate keys are hard errors with a
// line diagnostic; `overrides` are applied afterwards as if appended (the
// CLI layer passes explicit flags through here). Validation covers every
// invariant: seed present, law well formed, k <= min(dims), and so on.
ExperimentConfig parse_config(
    const std::string& text,
    const std::map<std::string, std::string>& overrides = {});

void validate_config(const ExperimentConfig& config);

struct CheckOutcome {
  std::string name;
  bool pass = true;
  bool gating = true;  // non-gating checks are reported as evidence only
  std::string detail;
};

struct RunResult {
  std::vector<TrialRecord> records;
  std::vector<std::string> trial_failures;
  std::vector<CheckOutcome> checks;
  std::string records_path;
  std::string manifest_path;
  int exit_code = 0;  // 0 pass, 1 statistical check failed, 3 trial failure
};

// Runs every (d, trial) job of the configured experiment in an OpenMP sweep,
// writes records.(csv|json), manifest.json, and plot data under the output
// directory, and evaluates the configured checks. `parallel = false` selects
// the serial reference path (same outputs, used for testing and benchmarks).
RunResult run_experiment(const ExperimentConfig& config, bool parallel = true);

// Writes plot-ready whitespace-delimited data files for finished records:
// eigenvalue clouds with target circles, convergence quantiles, tail curves.
// An empty record set produces the aggregate files, empty.
void emit_plotdata(const std::vector<TrialRecord>& records,
                   ExperimentKind kind, const SpectralLaw& law,
                   const std::string& out_dir);

// CSV column order, fixed:
// experiment_id,d,k,group,law,master_seed,trial_index,rho,r_plus_target,
// r_minus_target,annulus_coverage,lp_distance,lhs_mean,lhs_se,rhs_mean,
// rhs_se,c_hat,floor_c,wall_time_ms
std::string records_to_csv(const std::vector<TrialRecord>& records);
std::string records_to_json(const std::vector<TrialRecord>& records);

// Shortest round-trip decimal form of a double (fixed across platforms with
// the same binary; used for every numeric field the tool writes).
std::string format_double(double value);

}  // namespace ringlab
