#include "ringlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"
#include "ringlab/stats.hpp"
#include "ringlab/sweep.hpp"
#include "ringlab/version.hpp"

namespace ringlab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string iso_timestamp() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& value, int line, const std::string& key) {
  double out = 0.0;
  const auto [p, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw config_error("expected a number, got '" + value + "'", line, key);
  return out;
}

std::uint64_t to_u64(const std::string& value, int line,
                     const std::string& key) {
  std::uint64_t out = 0;
  const auto [p, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw config_error("expected a nonnegative integer, got '" + value + "'",
                       line, key);
  return out;
}

bool to_bool(const std::string& value, int line, const std::string& key) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw config_error("expected true/false, got '" + value + "'", line, key);
}

std::vector<std::size_t> to_dims(const std::string& value, int line,
                                 const std::string& key) {
  std::string body = trim(value);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']')
      throw config_error("unterminated list '" + value + "'", line, key);
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::size_t> dims;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t comma = body.find(',', start);
    const std::string item =
        trim(body.substr(start, comma == std::string::npos ? std::string::npos
                                                           : comma - start));
    if (!item.empty())
      dims.push_back(static_cast<std::size_t>(to_u64(item, line, key)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return dims;
}

void apply_key(ExperimentConfig& config, const std::string& section,
               const std::string& key, const std::string& value, int line) {
  if (section.empty()) {
    if (key == "experiment") {
      try {
        config.kind = parse_kind(value);
      } catch (const config_error&) {
        throw config_error("unknown experiment '" + value + "'", line, key);
      }
    } else if (key == "id") {
      config.id = value;
    } else if (key == "law") {
      config.law_literal = value;
    } else if (key == "dims") {
      config.dims = to_dims(value, line, key);
    } else if (key == "k") {
      config.k = static_cast<std::size_t>(to_u64(value, line, key));
    } else if (key == "group") {
      try {
        config.group = parse_group(value);
      } catch (const config_error& e) {
        throw config_error(e.what(), line, key);
      }
    } else if (key == "trials") {
      config.trials = static_cast<std::size_t>(to_u64(value, line, key));
    } else if (key == "samples") {
      config.samples = to_u64(value, line, key);
    } else if (key == "seed") {
      config.master_seed = to_u64(value, line, key);
      config.seed_set = true;
    } else if (key == "delta") {
      config.delta = to_double(value, line, key);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "format") {
      if (value == "csv")
        config.format = OutputFormat::Csv;
      else if (value == "json")
        config.format = OutputFormat::Json;
      else
        throw config_error("format must be csv or json", line, key);
    } else if (key == "field") {
      if (value == "real")
        config.sphere_field = Field::Real;
      else if (value == "complex")
        config.sphere_field = Field::Complex;
      else
        throw config_error("field must be real or complex", line, key);
    } else if (key == "rotate") {
      if (value == "none")
        config.rotate = false;
      else if (value == "two-sided")
        config.rotate = true;
      else
        throw config_error("rotate must be none or two-sided", line, key);
    } else if (key == "construction") {
      if (value == "quantile")
        config.iid_construction = false;
      else if (value == "iid")
        config.iid_construction = true;
      else
        throw config_error("construction must be quantile or iid", line, key);
    } else if (key == "rotate-group") {
      try {
        config.rotate_group = parse_group(value);
      } catch (const config_error& e) {
        throw config_error(e.what(), line, key);
      }
    } else if (key == "lp-tol") {
      config.lp_tol = to_double(value, line, key);
    } else if (key == "levy-c") {
      config.levy_c = to_double(value, line, key);
    } else if (key == "timings") {
      config.timings = to_bool(value, line, key);
    } else {
      throw config_error("unknown key '" + key + "'", line, key);
    }
    return;
  }
  if (section == "checks") {
    auto& checks = config.checks;
    if (key == "se-factor")
      checks.se_factor = to_double(value, line, key);
    else if (key == "rho-tol")
      checks.rho_tol = to_double(value, line, key);
    else if (key == "rho-quorum")
      checks.rho_quorum = to_double(value, line, key);
    else if (key == "coverage-min")
      checks.coverage_min = to_double(value, line, key);
    else if (key == "coverage-quorum")
      checks.coverage_quorum = to_double(value, line, key);
    else if (key == "slope-min")
      checks.slope_min = to_double(value, line, key);
    else if (key == "slope-max")
      checks.slope_max = to_double(value, line, key);
    else if (key == "decreasing-median")
      checks.decreasing_median = to_bool(value, line, key);
    else if (key == "unit-required")
      checks.unit_required = to_bool(value, line, key);
    else
      throw config_error("unknown key '" + key + "' in [checks]", line, key);
    return;
  }
  throw config_error("unknown section [" + section + "]", line);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

std::string csv_cell_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

// Minimal CSV quoting: wrap fields holding separators or quotes.
std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

const char* kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SingleRing:
      return "single-ring";
    case ExperimentKind::Conjecture:
      return "conjecture";
    case ExperimentKind::Concentration:
      return "concentration";
    case ExperimentKind::Sweep:
      return "sweep";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "single-ring") return ExperimentKind::SingleRing;
  if (name == "conjecture") return ExperimentKind::Conjecture;
  if (name == "concentration") return ExperimentKind::Concentration;
  if (name == "sweep") return ExperimentKind::Sweep;
  throw config_error("unknown experiment kind '" + name + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

ExperimentConfig parse_config(
    const std::string& text,
    const std::map<std::string, std::string>& overrides) {
  ExperimentConfig config;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string raw = text.substr(
        start, nl == std::string::npos ? std::string::npos : nl - start);
    ++line_no;
    const std::string line = trim(raw);
    if (!line.empty() && line.front() != '#') {
      if (line.front() == '[') {
        if (line.back() != ']')
          throw config_error("unterminated section header", line_no);
        section = trim(line.substr(1, line.size() - 2));
        if (section != "checks")
          throw config_error("unknown section [" + section + "]", line_no);
      } else {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
          throw config_error("expected key = value", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("empty key", line_no);
        const std::string qualified = section + "/" + key;
        if (!seen.insert(qualified).second)
          throw config_error("duplicate key '" + key + "'", line_no, key);
        apply_key(config, section, key, value, line_no);
      }
    }
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  for (const auto& [key, value] : overrides) {
    const std::size_t slash = key.find('/');
    const std::string sec =
        slash == std::string::npos ? std::string{} : key.substr(0, slash);
    const std::string bare =
        slash == std::string::npos ? key : key.substr(slash + 1);
    apply_key(config, sec, bare, value, 0);
  }
  if (config.id.empty()) config.id = kind_name(config.kind);
  validate_config(config);
  return config;
}

void validate_config(const ExperimentConfig& config) {
  if (!config.seed_set)
    throw config_error(
        "missing seed: configs must pin master_seed (wall-clock seeding is "
        "refused)",
        0, "seed");
  if (config.law_literal.empty())
    throw config_error("missing law literal", 0, "law");
  (void)SpectralLaw::parse(config.law_literal);  // throws with diagnostics
  if (config.dims.empty())
    throw config_error("dims must list at least one dimension", 0, "dims");
  for (std::size_t d : config.dims)
    if (d < 2) throw config_error("every dimension must be >= 2", 0, "dims");
  const std::size_t min_dim =
      *std::min_element(config.dims.begin(), config.dims.end());
  if (config.k == 0) throw config_error("k must be >= 1", 0, "k");
  if (config.k > min_dim)
    throw config_error("k exceeds d (k = " + std::to_string(config.k) +
                           ", smallest dim = " + std::to_string(min_dim) + ")",
                       0, "k");
  if (config.trials < 1) throw config_error("trials must be >= 1", 0, "trials");
  if (config.samples < 2)
    throw config_error("samples must be >= 2", 0, "samples");
  if (config.delta < 0.0) throw config_error("delta must be >= 0", 0, "delta");
  if (!(config.lp_tol > 0.0))
    throw config_error("lp-tol must be > 0", 0, "lp-tol");
  if (!(config.levy_c > 0.0))
    throw config_error("levy-c must be > 0", 0, "levy-c");
  if (config.out_dir.empty())
    throw config_error("output directory must not be empty", 0, "out");
  const auto& c = config.checks;
  if (!(c.se_factor > 0.0))
    throw config_error("se-factor must be > 0", 0, "se-factor");
  if (c.rho_quorum < 0.0 || c.rho_quorum > 1.0)
    throw config_error("rho-quorum must lie in [0, 1]", 0, "rho-quorum");
  if (c.coverage_quorum < 0.0 || c.coverage_quorum > 1.0)
    throw config_error("coverage-quorum must lie in [0, 1]", 0,
                       "coverage-quorum");
  if (c.slope_min > c.slope_max)
    throw config_error("slope-min must not exceed slope-max", 0, "slope-min");
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "experiment_id,d,k,group,law,master_seed,trial_index,rho,r_plus_target,"
      "r_minus_target,annulus_coverage,lp_distance,lhs_mean,lhs_se,rhs_mean,"
      "rhs_se,c_hat,floor_c,wall_time_ms\n";
  for (const auto& r : records) {
    out += csv_escape(r.experiment_id);
    out += ',' + std::to_string(r.d);
    out += ',';
    if (r.k) out += std::to_string(*r.k);
    out += ',';
    if (r.group) out += group_name(*r.group);
    out += ',' + csv_escape(r.law);
    out += ',' + std::to_string(r.master_seed);
    out += ',' + std::to_string(r.trial_index);
    out += ',' + csv_cell_double(r.rho);
    out += ',' + csv_cell_double(r.r_plus_target);
    out += ',' + csv_cell_double(r.r_minus_target);
    out += ',' + csv_cell_double(r.annulus_coverage);
    out += ',' + csv_cell_double(r.lp_distance);
    out += ',' + csv_cell_double(r.lhs_mean);
    out += ',' + csv_cell_double(r.lhs_se);
    out += ',' + csv_cell_double(r.rhs_mean);
    out += ',' + csv_cell_double(r.rhs_se);
    out += ',' + csv_cell_double(r.c_hat);
    out += ',' + csv_cell_double(r.floor_c);
    out += ',';
    if (r.wall_time_ms) out += std::to_string(*r.wall_time_ms);
    out += '\n';
  }
  return out;
}

std::string records_to_json(const std::vector<TrialRecord>& records) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : records) {
    ordered_json j;
    j["experiment_id"] = r.experiment_id;
    j["d"] = r.d;
    if (r.k) j["k"] = *r.k;
    if (r.group) j["group"] = group_name(*r.group);
    j["law"] = r.law;
    j["master_seed"] = r.master_seed;
    j["trial_index"] = r.trial_index;
    const auto put = [&j](const char* name, const std::optional<double>& v) {
      if (v) j[name] = *v;
    };
    put("rho", r.rho);
    put("r_plus_target", r.r_plus_target);
    put("r_minus_target", r.r_minus_target);
    put("annulus_coverage", r.annulus_coverage);
    put("lp_distance", r.lp_distance);
    put("lhs_mean", r.lhs_mean);
    put("lhs_se", r.lhs_se);
    put("rhs_mean", r.rhs_mean);
    put("rhs_se", r.rhs_se);
    put("c_hat", r.c_hat);
    put("floor_c", r.floor_c);
    if (r.wall_time_ms) j["wall_time_ms"] = *r.wall_time_ms;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

namespace {

struct JobOutput {
  TrialRecord record;
  bool ok = false;
  std::string error;
  std::vector<cplx> cloud;   // single-ring / sweep
  ConcentrationStats stats;  // concentration
  bool has_stats = false;
};

ordered_json config_echo(const ExperimentConfig& config) {
  ordered_json j;
  j["experiment"] = kind_name(config.kind);
  j["id"] = config.id;
  j["law"] = config.law_literal;
  j["dims"] = config.dims;
  j["k"] = config.k;
  j["group"] = group_name(config.group);
  j["trials"] = config.trials;
  j["samples"] = config.samples;
  j["seed"] = config.master_seed;
  j["delta"] = config.delta;
  j["out"] = config.out_dir;
  j["format"] = config.format == OutputFormat::Csv ? "csv" : "json";
  j["field"] = field_name(config.sphere_field);
  j["rotate"] = config.rotate ? "two-sided" : "none";
  j["construction"] = config.iid_construction ? "iid" : "quantile";
  j["rotate-group"] = group_name(config.rotate_group);
  j["lp-tol"] = config.lp_tol;
  j["levy-c"] = config.levy_c;
  j["timings"] = config.timings;
  ordered_json checks;
  checks["se-factor"] = config.checks.se_factor;
  checks["rho-tol"] = config.checks.rho_tol;
  checks["rho-quorum"] = config.checks.rho_quorum;
  checks["coverage-min"] = config.checks.coverage_min;
  checks["coverage-quorum"] = config.checks.coverage_quorum;
  checks["slope-min"] = config.checks.slope_min;
  checks["slope-max"] = config.checks.slope_max;
  checks["decreasing-median"] = config.checks.decreasing_median;
  checks["unit-required"] = config.checks.unit_required;
  j["checks"] = std::move(checks);
  return j;
}

// One (d, trial) job. All stream derivation happens here so a record is
// reproducible from its own (master_seed, trial_index, d) triple.
JobOutput run_job(const ExperimentConfig& config, const SpectralLaw& law,
                  std::size_t d, std::size_t trial) {
  const SeedSpec row_seed{config.master_seed, trial};
  const SeedSpec base = row_seed.child(d);
  const auto job_start = std::chrono::steady_clock::now();

  JobOutput out;
  out.record.experiment_id = config.id;
  out.record.d = d;
  out.record.law = law.literal();
  out.record.master_seed = config.master_seed;
  out.record.trial_index = trial;

  try {
    switch (config.kind) {
      case ExperimentKind::SingleRing:
      case ExperimentKind::Sweep: {
        SingleRingOptions opts;
        opts.lp_tol = config.lp_tol;
        opts.iid_construction = config.iid_construction;
        auto trial_out = single_ring_trial(
            law, d, config.group,
            RotationSpec{config.rotate, config.rotate_group}, row_seed,
            config.delta, opts);
        out.cloud = std::move(trial_out.cloud);
        out.record = std::move(trial_out.record);
        out.record.experiment_id = config.id;
        break;
      }
      case ExperimentKind::Conjecture: {
        Matrix a = config.iid_construction ? iid_matrix(law, d, base.child(4))
                                           : quantile_matrix(law, d);
        if (config.rotate)
          a = rotate_ensemble(a, RotationSpec{true, config.rotate_group},
                              base.child(1));
        const auto report =
            conjecture_report(a, config.group, config.k, config.samples,
                              base.child(2), config.checks.se_factor);
        out.record.k = config.k;
        out.record.group = config.group;
        const auto radii = ring_radii(law);
        out.record.r_plus_target = radii.r_plus;
        out.record.r_minus_target = radii.r_minus;
        out.record.lhs_mean = report.lhs.mean;
        out.record.lhs_se = report.lhs.std_error();
        out.record.rhs_mean = report.rhs.mean;
        out.record.rhs_se = report.rhs.std_error();
        if (report.c_hat_defined) out.record.c_hat = report.c_hat;
        out.record.floor_c = report.floor_c;
        break;
      }
      case ExperimentKind::Concentration: {
        Matrix a = config.iid_construction ? iid_matrix(law, d, base.child(4))
                                           : quantile_matrix(law, d);
        if (config.rotate)
          a = rotate_ensemble(a, RotationSpec{true, config.rotate_group},
                              base.child(1));
        ConcentrationOptions opts;
        opts.c_ref = config.levy_c;
        out.stats = sphere_pushforward_stats(a, config.samples, base.child(3),
                                             config.sphere_field, opts);
        out.has_stats = true;
        const auto radii = ring_radii(law);
        out.record.r_plus_target = radii.r_plus;
        out.record.r_minus_target = radii.r_minus;
        break;
      }
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = "d=" + std::to_string(d) +
                " trial_index=" + std::to_string(trial) +
                " master_seed=" + std::to_string(config.master_seed) + ": " +
                e.what();
  }

  if (config.timings) {
    const auto elapsed = std::chrono::steady_clock::now() - job_start;
    out.record.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }
  return out;
}

double exact_mean_norm_sq(const Matrix& a) {
  // E ||A v||^2 over the uniform sphere is (1/d) sum_i sigma_i(A)^2.
  double sum = 0.0;
  for (double s : singular_values(a)) sum += s * s;
  return sum / static_cast<double>(a.dim());
}

}  // namespace

void emit_plotdata(const std::vector<TrialRecord>& records,
                   ExperimentKind kind, const SpectralLaw& law,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path plots = fs::path(out_dir) / "plots";
  fs::create_directories(plots);

  const auto radii = ring_radii(law);
  const auto write_circle = [&](const char* name, double r) {
    std::string body;
    constexpr std::size_t kPoints = 256;
    constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
    for (std::size_t i = 0; i < kPoints; ++i) {
      const double theta =
          kTwoPi * static_cast<double>(i) / static_cast<double>(kPoints);
      body += format_double(r * std::cos(theta)) + " " +
              format_double(r * std::sin(theta)) + " " + format_double(r) +
              "\n";
    }
    write_file(plots / name, body);
  };

  switch (kind) {
    case ExperimentKind::SingleRing:
    case ExperimentKind::Sweep: {
      write_circle("circle_rplus.xy", radii.r_plus);
      write_circle("circle_rminus.xy", radii.r_minus);
      std::string rho_body;
      for (const auto& r : records) {
        if (!r.rho) continue;
        rho_body += std::to_string(r.d) + " " + std::to_string(r.trial_index) +
                    " " + format_double(*r.rho) + " " +
                    format_double(std::abs(*r.rho - radii.r_plus)) + " " +
                    csv_cell_double(r.annulus_coverage) + " " +
                    csv_cell_double(r.lp_distance) + "\n";
      }
      write_file(plots / "rho_vs_trial.xy", rho_body);
      if (kind == ExperimentKind::Sweep) {
        std::vector<std::size_t> dims;
        for (const auto& r : records)
          if (r.rho && (dims.empty() || dims.back() != r.d))
            dims.push_back(r.d);
        std::string conv;
        for (std::size_t d : dims) {
          std::vector<double> devs;
          for (const auto& r : records)
            if (r.rho && r.d == d)
              devs.push_back(std::abs(*r.rho - radii.r_plus));
          if (devs.empty()) continue;
          conv += std::to_string(d) + " " + format_double(quantile(devs, 0.1)) +
                  " " + format_double(quantile(devs, 0.5)) + " " +
                  format_double(quantile(devs, 0.9)) + "\n";
        }
        write_file(plots / "convergence.xy", conv);
      }
      break;
    }
    case ExperimentKind::Conjecture: {
      std::string body;
      for (const auto& r : records) {
        if (!r.lhs_mean) continue;
        body += std::to_string(r.d) + " " + std::to_string(r.k.value_or(0)) +
                " " + csv_cell_double(r.lhs_mean) + " " +
                csv_cell_double(r.lhs_se) + " " + csv_cell_double(r.rhs_mean) +
                " " + csv_cell_double(r.rhs_se) + " " +
                csv_cell_double(r.c_hat) + " " + csv_cell_double(r.floor_c) +
                "\n";
      }
      write_file(plots / "estimates.xy", body);
      break;
    }
    case ExperimentKind::Concentration: {
      std::string body;
      for (const auto& r : records)
        body += std::to_string(r.d) + " " + csv_cell_double(r.r_plus_target) +
                " " + csv_cell_double(r.r_minus_target) + "\n";
      write_file(plots / "sphere_targets.xy", body);
      break;
    }
  }
}

RunResult run_experiment(const ExperimentConfig& config, bool parallel) {
  validate_config(config);
  const SpectralLaw law = config.law();
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const std::string started = iso_timestamp();

  const std::size_t jobs = config.dims.size() * config.trials;
  const auto outputs = run_indexed(
      jobs,
      [&](std::size_t index) {
        const std::size_t d = config.dims[index / config.trials];
        const std::size_t trial = index % config.trials;
        return run_job(config, law, d, trial);
      },
      parallel);

  RunResult result;
  for (const auto& o : outputs) {
    if (o.ok)
      result.records.push_back(o.record);
    else
      result.trial_failures.push_back(o.error);
  }

  // --- aggregate summaries and checks ------------------------------------
  const auto radii = ring_radii(law);
  ordered_json summary;
  const auto& thresholds = config.checks;

  const auto per_dim_records = [&](std::size_t d) {
    std::vector<const TrialRecord*> rows;
    for (const auto& r : result.records)
      if (r.d == d) rows.push_back(&r);
    return rows;
  };

  if (config.kind == ExperimentKind::SingleRing ||
      config.kind == ExperimentKind::Sweep) {
    ordered_json dims_summary = ordered_json::array();
    std::vector<double> medians;
    std::vector<std::size_t> dims_with_rows;
    for (std::size_t d : config.dims) {
      const auto rows = per_dim_records(d);
      if (rows.empty()) continue;
      std::vector<double> devs, coverages;
      for (const auto* r : rows) {
        if (r->rho) devs.push_back(std::abs(*r->rho - radii.r_plus));
        if (r->annulus_coverage) coverages.push_back(*r->annulus_coverage);
      }
      if (devs.empty()) continue;
      std::size_t rho_ok = 0, cov_ok = 0;
      for (double dev : devs)
        if (dev <= thresholds.rho_tol) ++rho_ok;
      for (double c : coverages)
        if (c >= thresholds.coverage_min) ++cov_ok;
      ordered_json dj;
      dj["d"] = d;
      dj["trials"] = rows.size();
      dj["median_abs_rho_dev"] = median(devs);
      dj["rho_within_tol_fraction"] =
          static_cast<double>(rho_ok) / static_cast<double>(devs.size());
      dj["coverage_pass_fraction"] =
          static_cast<double>(cov_ok) / static_cast<double>(coverages.size());
      dims_summary.push_back(dj);
      medians.push_back(median(devs));
      dims_with_rows.push_back(d);
    }
    summary["r_plus_target"] = radii.r_plus;
    summary["r_minus_target"] = radii.r_minus;
    summary["dims"] = dims_summary;

    if (!dims_with_rows.empty()) {
      const std::size_t d_max =
          *std::max_element(dims_with_rows.begin(), dims_with_rows.end());
      const auto rows = per_dim_records(d_max);
      std::size_t rho_ok = 0, cov_ok = 0, n_rho = 0, n_cov = 0;
      for (const auto* r : rows) {
        if (r->rho) {
          ++n_rho;
          if (std::abs(*r->rho - radii.r_plus) <= thresholds.rho_tol) ++rho_ok;
        }
        if (r->annulus_coverage) {
          ++n_cov;
          if (*r->annulus_coverage >= thresholds.coverage_min) ++cov_ok;
        }
      }
      const double rho_frac =
          n_rho ? static_cast<double>(rho_ok) / static_cast<double>(n_rho)
                : 0.0;
      const double cov_frac =
          n_cov ? static_cast<double>(cov_ok) / static_cast<double>(n_cov)
                : 0.0;
      result.checks.push_back(
          {"rho-concentration", rho_frac >= thresholds.rho_quorum, true,
           "d=" + std::to_string(d_max) + ": |rho - R+| <= " +
               format_double(thresholds.rho_tol) + " in " +
               format_double(rho_frac * 100.0) + "% of trials (need >= " +
               format_double(thresholds.rho_quorum * 100.0) + "%)"});
      result.checks.push_back(
          {"annulus-coverage", cov_frac >= thresholds.coverage_quorum, true,
           "d=" + std::to_string(d_max) + ": coverage >= " +
               format_double(thresholds.coverage_min) + " in " +
               format_double(cov_frac * 100.0) + "% of trials (need >= " +
               format_double(thresholds.coverage_quorum * 100.0) + "%)"});
    }

    if (config.kind == ExperimentKind::Sweep) {
      if (medians.size() >= 2) {
        bool decreasing = true;
        for (std::size_t i = 1; i < medians.size(); ++i)
          if (!(medians[i] < medians[i - 1])) decreasing = false;
        if (thresholds.decreasing_median)
          result.checks.push_back(
              {"decreasing-median", decreasing, true,
               "median |rho - R+| strictly decreasing across dims"});
        std::vector<double> log_d, log_med;
        for (std::size_t i = 0; i < medians.size(); ++i)
          if (medians[i] > 0.0) {
            log_d.push_back(std::log(static_cast<double>(dims_with_rows[i])));
            log_med.push_back(std::log(medians[i]));
          }
        if (log_d.size() >= 2)
          summary["median_dev_log_slope"] = regression_slope(log_d, log_med);
      }
      // track the sphere means against R_+ per dimension
      ordered_json sphere = ordered_json::array();
      for (std::size_t d : config.dims) {
        const SeedSpec sweep_base = SeedSpec{config.master_seed, 0}.child(d);
        Matrix a = config.iid_construction
                       ? iid_matrix(law, d, sweep_base.child(4))
                       : quantile_matrix(law, d);
        if (config.rotate)
          a = rotate_ensemble(a, RotationSpec{true, config.rotate_group},
                              sweep_base.child(1));
        const auto stats = sphere_pushforward_stats(
            a, config.samples,
            SeedSpec{config.master_seed, 0}.child(d).child(3),
            config.sphere_field);
        ordered_json sj;
        sj["d"] = d;
        sj["mean_norm"] = stats.norm.mean;
        sj["mean_log_norm"] = stats.log_norm.mean;
        sj["target_r_plus"] = radii.r_plus;
        sj["target_log_r_plus"] = std::log(radii.r_plus);
        sphere.push_back(sj);
      }
      summary["sphere_means"] = sphere;
    }
  }

  if (config.kind == ExperimentKind::Conjecture) {
    bool all_floor = true, all_unit = true;
    ordered_json rows = ordered_json::array();
    for (const auto& r : result.records) {
      if (!r.lhs_mean || !r.rhs_mean) continue;
      const double lhs_se = r.lhs_se.value_or(0.0);
      const double rhs_se = r.rhs_se.value_or(0.0);
      const double floor_c = r.floor_c.value_or(0.0);
      const double floor_se =
          std::sqrt(lhs_se * lhs_se + floor_c * floor_c * rhs_se * rhs_se);
      const double unit_se = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
      const bool floor_pass =
          *r.lhs_mean >=
          floor_c * *r.rhs_mean - thresholds.se_factor * floor_se;
      const bool unit_pass =
          *r.lhs_mean >= *r.rhs_mean - thresholds.se_factor * unit_se;
      all_floor = all_floor && floor_pass;
      all_unit = all_unit && unit_pass;
      ordered_json rj;
      rj["d"] = r.d;
      rj["trial_index"] = r.trial_index;
      rj["lhs_mean"] = *r.lhs_mean;
      rj["rhs_mean"] = *r.rhs_mean;
      if (r.c_hat) rj["c_hat"] = *r.c_hat;
      rj["floor_c"] = floor_c;
      rj["floor_pass"] = floor_pass;
      rj["unit_pass"] = unit_pass;
      rows.push_back(rj);
    }
    summary["reports"] = rows;
    result.checks.push_back({"floor-constant", all_floor, true,
                             "lhs >= rhs/binomial(d,k) - " +
                                 format_double(thresholds.se_factor) +
                                 " SE on every report"});
    result.checks.push_back(
        {"unit-constant", all_unit, thresholds.unit_required,
         "lhs >= rhs - " + format_double(thresholds.se_factor) +
             " SE on every report"});
  }

  if (config.kind == ExperimentKind::Concentration) {
    bool all_mean_ok = true;
    ordered_json dims_summary = ordered_json::array();
    std::vector<double> log_d, log_var;
    for (std::size_t di = 0; di < config.dims.size(); ++di) {
      const std::size_t d = config.dims[di];
      RunningStats var_pool;
      ordered_json trials_json = ordered_json::array();
      double target = 0.0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const auto& o = outputs[di * config.trials + t];
        if (!o.ok || !o.has_stats) continue;
        const SeedSpec base = SeedSpec{config.master_seed, t}.child(d);
        Matrix a = config.iid_construction ? iid_matrix(law, d, base.child(4))
                                           : quantile_matrix(law, d);
        if (config.rotate)
          a = rotate_ensemble(a, RotationSpec{true, config.rotate_group},
                              base.child(1));
        target = exact_mean_norm_sq(a);
        const auto& stats = o.stats;
        const bool mean_ok =
            std::abs(stats.norm_sq.mean - target) <=
            thresholds.se_factor * stats.norm_sq.std_error();
        all_mean_ok = all_mean_ok && mean_ok;
        var_pool.add(stats.norm_sq.variance);
        ordered_json tj;
        tj["trial_index"] = t;
        tj["mean_norm_sq"] = stats.norm_sq.mean;
        tj["se_norm_sq"] = stats.norm_sq.std_error();
        tj["target_norm_sq"] = target;
        tj["mean_ok"] = mean_ok;
        tj["mean_norm"] = stats.norm.mean;
        tj["mean_log_norm"] = stats.log_norm.mean;
        tj["median_norm_sq"] = stats.norm_sq_median;
        tj["variance_norm_sq"] = stats.norm_sq.variance;
        tj["lipschitz_L"] = stats.lipschitz_L;
        tj["sphere_real_dim"] = stats.sphere_real_dim;
        tj["c_fitted"] = stats.c_fitted;
        trials_json.push_back(tj);
      }
      ordered_json dj;
      dj["d"] = d;
      dj["target_norm_sq"] = target;
      dj["trials"] = trials_json;
      if (var_pool.count() > 0) {
        dj["mean_variance_norm_sq"] = var_pool.mean();
        log_d.push_back(std::log(static_cast<double>(d)));
        log_var.push_back(std::log(var_pool.mean()));
      }
      dims_summary.push_back(dj);
    }
    summary["dims"] = dims_summary;
    summary["sphere_field"] = field_name(config.sphere_field);
    result.checks.push_back(
        {"mean-vs-exact", all_mean_ok, true,
         "sample mean of ||Av||^2 within " +
             format_double(thresholds.se_factor) +
             " SE of (1/d) sum a_i^2 at every (d, trial)"});
    if (log_d.size() >= 3) {
      const double slope = regression_slope(log_d, log_var);
      summary["variance_log_slope"] = slope;
      result.checks.push_back(
          {"variance-slope",
           slope >= thresholds.slope_min && slope <= thresholds.slope_max,
           true,
           "log-variance vs log-d slope " + format_double(slope) +
               " within [" + format_double(thresholds.slope_min) + ", " +
               format_double(thresholds.slope_max) + "]"});
    } else if (log_d.size() == 2) {
      summary["variance_log_slope"] = regression_slope(log_d, log_var);
    }
  }

  // --- write outputs ------------------------------------------------------
  const fs::path out_dir(config.out_dir);
  const bool csv = config.format == OutputFormat::Csv;
  const fs::path records_path =
      out_dir / (csv ? "records.csv" : "records.json");
  write_file(records_path, csv ? records_to_csv(result.records)
                               : records_to_json(result.records));
  result.records_path = records_path.string();

  emit_plotdata(result.records, config.kind, law, config.out_dir);

  // payload-derived plot data: eigenvalue clouds and tail curves
  const fs::path plots = out_dir / "plots";
  for (const auto& o : outputs) {
    if (!o.ok) continue;
    if (!o.cloud.empty()) {
      std::string body;
      for (const auto& z : o.cloud)
        body += format_double(z.real()) + " " + format_double(z.imag()) + "\n";
      write_file(plots / ("cloud_d" + std::to_string(o.record.d) + "_t" +
                          std::to_string(o.record.trial_index) + ".xy"),
                 body);
    }
    if (o.has_stats && o.record.trial_index == 0) {
      std::string body;
      for (std::size_t e = 0; e < o.stats.eps_grid.size(); ++e)
        body += format_double(o.stats.eps_grid[e]) + " " +
                format_double(o.stats.tail_empirical[e]) + " " +
                format_double(o.stats.tail_reference[e]) + "\n";
      write_file(plots / ("tails_d" + std::to_string(o.record.d) + ".xy"),
                 body);
    }
  }
  if (config.kind == ExperimentKind::Concentration) {
    std::string body;
    for (std::size_t di = 0; di < config.dims.size(); ++di) {
      RunningStats var_pool, mean_pool;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const auto& o = outputs[di * config.trials + t];
        if (o.ok && o.has_stats) {
          var_pool.add(o.stats.norm_sq.variance);
          mean_pool.add(o.stats.norm_sq.mean);
        }
      }
      if (var_pool.count() > 0)
        body += std::to_string(config.dims[di]) + " " +
                format_double(var_pool.mean()) + " " +
                format_double(mean_pool.mean()) + "\n";
    }
    write_file(plots / "variance_vs_d.xy", body);
  }

  // --- manifest -----------------------------------------------------------
  ordered_json manifest;
  manifest["tool"] = "ringlab";
  manifest["version"] = kVersion;
  manifest["config"] = config_echo(config);
  manifest["started"] = started;
  ordered_json seeds = ordered_json::array();
  for (std::size_t di = 0; di < config.dims.size(); ++di)
    for (std::size_t t = 0; t < config.trials; ++t) {
      ordered_json sj;
      sj["d"] = config.dims[di];
      sj["trial_index"] = t;
      sj["stream"] =
          SeedSpec{config.master_seed, t}.child(config.dims[di]).stream();
      seeds.push_back(sj);
    }
  manifest["trial_seeds"] = seeds;
  manifest["summary"] = summary;
  ordered_json checks_json = ordered_json::array();
  bool gating_failed = false;
  for (const auto& c : result.checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["gating"] = c.gating;
    cj["detail"] = c.detail;
    checks_json.push_back(cj);
    if (c.gating && !c.pass) gating_failed = true;
  }
  manifest["checks"] = checks_json;
  manifest["trial_failures"] = result.trial_failures;

  result.exit_code =
      !result.trial_failures.empty() ? 3 : (gating_failed ? 1 : 0);
  manifest["exit_code"] = result.exit_code;
  manifest["finished"] = iso_timestamp();

  const fs::path manifest_path = out_dir / "manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");
  result.manifest_path = manifest_path.string();
  return result;
}

}  // namespace ringlab
