// ringlab: seeded Monte Carlo experiments on Haar-rotated matrix ensembles.
//
// Subcommands: single-ring, conjecture, concentration, sweep, sample,
// lp-dist. Exit codes: 0 pass, 1 statistical check failed, 2 usage/config
// error, 3 numerical failure.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "ringlab/error.hpp"
#include "ringlab/experiment.hpp"
#include "ringlab/matrix.hpp"
#include "ringlab/measures.hpp"
#include "ringlab/sampling.hpp"
#include "ringlab/sweep.hpp"
#include "ringlab/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> set_kvs;
  int threads = 0;
  bool serial = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ringlab::config_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_experiment_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file");
  cmd->add_option("--threads", args.threads, "OpenMP thread count (0 = auto)");
  cmd->add_flag("--serial", args.serial,
                "run the serial reference sweep instead of OpenMP");
  // every config key is also a flag; explicit flags override the file
  const auto opt = [cmd, &args](const std::string& key,
                                const std::string& help) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [&args, key](const std::string& v) { args.overrides[key] = v; }, help);
  };
  opt("law", "law literal: two-atom:a,b[,p] | uniform:a,b | atoms:x:w,...");
  opt("dims", "dimension list, e.g. [64,256,512]");
  opt("k", "Grassmannian dimension");
  opt("group", "U | O | SU | SO");
  opt("trials", "trials per dimension");
  opt("samples", "Monte Carlo samples per estimate");
  opt("seed", "master seed (required here or in the config)");
  opt("delta", "annulus fattening");
  opt("out", "output directory");
  opt("format", "csv | json");
  opt("field", "sphere convention: real | complex");
  opt("rotate", "none | two-sided");
  opt("rotate-group", "group for two-sided rotation");
  opt("lp-tol", "Levy-Prokhorov tolerance in trials");
  opt("levy-c", "constant in the reference tail curve");
  opt("timings", "true: record per-trial wall time (breaks byte-identical "
                 "reruns)");
  cmd->add_option("--set", args.set_kvs,
                  "extra key=value override, e.g. --set checks/rho-tol=0.1");
}

int run_kind(ringlab::ExperimentKind kind, const CommonArgs& args) {
  ringlab::init_runtime(args.threads);
  auto overrides = args.overrides;
  for (const auto& kv : args.set_kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ringlab::config_error("--set expects key=value, got '" + kv + "'");
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  overrides["experiment"] = ringlab::kind_name(kind);
  const std::string text =
      args.config_path.empty() ? std::string{} : read_file(args.config_path);
  const auto config = ringlab::parse_config(text, overrides);
  const auto result = ringlab::run_experiment(config, !args.serial);

  for (const auto& check : result.checks)
    std::printf("[%s] %s%s: %s\n", check.pass ? "PASS" : "FAIL",
                check.name.c_str(), check.gating ? "" : " (evidence)",
                check.detail.c_str());
  for (const auto& failure : result.trial_failures)
    std::fprintf(stderr, "trial failure: %s\n", failure.c_str());
  std::printf("records: %s\nmanifest: %s\n", result.records_path.c_str(),
              result.manifest_path.c_str());
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical experiments around Haar-rotated matrix ensembles"};
  app.set_version_flag("--version", ringlab::kVersion);
  app.require_subcommand(1);

  CommonArgs sr_args, cj_args, cc_args, sw_args;
  auto* sr = app.add_subcommand("single-ring",
                                "spectral radius and annulus support trials");
  add_experiment_options(sr, sr_args);
  auto* cj = app.add_subcommand("conjecture",
                                "Monte Carlo check of both inequality sides");
  add_experiment_options(cj, cj_args);
  auto* cc = app.add_subcommand("concentration",
                                "sphere pushforward statistics and tails");
  add_experiment_options(cc, cc_args);
  auto* sw = app.add_subcommand("sweep",
                                "single-ring trials across dimensions");
  add_experiment_options(sw, sw_args);

  // sample: dump one Haar matrix as JSON
  std::string sample_group = "SU";
  std::size_t sample_dim = 2;
  std::uint64_t sample_seed = 0;
  bool sample_seed_set = false;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "dump a Haar matrix as JSON");
  sample->add_option("--group", sample_group, "U | O | SU | SO");
  sample->add_option("--dim", sample_dim, "matrix dimension")->required();
  sample->add_option_function<std::uint64_t>(
      "--seed",
      [&](std::uint64_t s) {
        sample_seed = s;
        sample_seed_set = true;
      },
      "master seed")
      ->required();
  sample->add_option("--out", sample_out, "output file (default stdout)");

  // lp-dist: distance between two measure JSON files
  std::string lp_a, lp_b;
  double lp_tol = 1e-4;
  auto* lp = app.add_subcommand(
      "lp-dist", "Levy-Prokhorov distance between two measure JSON files");
  lp->add_option("alpha", lp_a, "measure JSON file")->required();
  lp->add_option("beta", lp_b, "measure JSON file")->required();
  lp->add_option("--tol", lp_tol, "distance tolerance");

  try {
    app.parse(argc, argv);

    if (sr->parsed()) return run_kind(ringlab::ExperimentKind::SingleRing, sr_args);
    if (cj->parsed()) return run_kind(ringlab::ExperimentKind::Conjecture, cj_args);
    if (cc->parsed())
      return run_kind(ringlab::ExperimentKind::Concentration, cc_args);
    if (sw->parsed()) return run_kind(ringlab::ExperimentKind::Sweep, sw_args);

    if (sample->parsed()) {
      ringlab::init_runtime(0);
      if (!sample_seed_set)
        throw ringlab::config_error("sample requires --seed");
      const auto u =
          ringlab::sample_haar(ringlab::parse_group(sample_group), sample_dim,
                               ringlab::SeedSpec{sample_seed, 0});
      const std::string json = ringlab::matrix_to_json(u);
      if (sample_out.empty()) {
        std::printf("%s\n", json.c_str());
      } else {
        std::ofstream out(sample_out, std::ios::binary);
        if (!out)
          throw ringlab::config_error("cannot write '" + sample_out + "'");
        out << json << "\n";
      }
      return 0;
    }

    if (lp->parsed()) {
      ringlab::init_runtime(0);
      const auto alpha = ringlab::measure_from_json(read_file(lp_a));
      const auto beta = ringlab::measure_from_json(read_file(lp_b));
      const double dist = ringlab::levy_prokhorov(alpha, beta, lp_tol);
      std::printf("%s\n", ringlab::format_double(dist).c_str());
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  } catch (const ringlab::config_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const ringlab::numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
