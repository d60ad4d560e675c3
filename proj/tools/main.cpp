// onmf: command line front end for the mean-field O(N) laboratory.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "onmf/experiment.hpp"

namespace ex = onmf::experiment;

namespace {

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ManifestFlags {
  std::uint64_t seed = 1;
  int dim = 2;
  double beta = 1.0;
  std::int64_t n = 1000;
  std::uint64_t chains = 1;
  std::uint64_t burn_in = 200;
  std::uint64_t thin = 1;
  std::uint64_t samples = 1000;
  std::uint64_t pairs = 1000;
  std::string statistic;
  double c_N = 1.0;
  std::string start = "random";
  std::string manifest_file;
};

void add_manifest_flags(CLI::App* cmd, ManifestFlags& f) {
  cmd->add_option("--manifest", f.manifest_file, "JSON manifest; flags given explicitly override it");
  cmd->add_option("--seed", f.seed, "64-bit master seed");
  cmd->add_option("--dim", f.dim, "spin dimension N")->check(CLI::Range(2, 64));
  cmd->add_option("--beta", f.beta, "inverse temperature")->check(CLI::NonNegativeNumber);
  cmd->add_option("--n", f.n, "number of sites")->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  cmd->add_option("--chains", f.chains, "independent chains");
  cmd->add_option("--burn-in", f.burn_in, "burn-in sweeps per chain");
  cmd->add_option("--thin", f.thin, "sweeps between recorded samples");
  cmd->add_option("--samples", f.samples, "recorded samples per chain");
  cmd->add_option("--statistic", f.statistic, "subcritical | supercritical | critical (default: from beta)");
  cmd->add_option("--c-n", f.c_N, "scale of the critical statistic");
  cmd->add_option("--start", f.start, "random | aligned")->check(CLI::IsMember({"random", "aligned"}));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ex::RunManifest build_manifest(const CLI::App* cmd, const ManifestFlags& f) {
  ex::RunManifest m;
  if (!f.manifest_file.empty()) m = ex::RunManifest::from_json(slurp(f.manifest_file));
  auto given = [&](const char* name) {
    return f.manifest_file.empty() || cmd->count(name) > 0;
  };
  if (given("--seed")) m.master_seed = f.seed;
  if (given("--dim")) m.params.dim = f.dim;
  if (given("--beta")) m.params.beta = f.beta;
  if (given("--n")) m.params.n_sites = f.n;
  if (given("--chains")) m.chains = f.chains;
  if (given("--burn-in")) m.burn_in_sweeps = f.burn_in;
  if (given("--thin")) m.thin_sweeps = f.thin;
  if (given("--samples")) m.samples_per_chain = f.samples;
  if (given("--c-n")) m.c_N = f.c_N;
  if (given("--start")) m.start = f.start == "aligned" ? onmf::sampler::InitialState::aligned
                                                       : onmf::sampler::InitialState::random;
  if (!f.statistic.empty()) {
    m.statistic = onmf::regime_from_string(f.statistic);
  } else if (f.manifest_file.empty()) {
    m.statistic = m.params.regime();
  }
  m.artifact_version = ex::artifact_version();
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return m;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string stem_of(const std::string& csv_path) {
  const auto dot = csv_path.rfind(".csv");
  return dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
}

void print_checks(const std::vector<ex::Check>& checks) {
  for (const auto& c : checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << c.value
              << " (threshold " << c.threshold << ")\n";
  }
}

// Rewrites `sub ... --config FILE ...` as `sub --key value ... ...`, reading
// FILE with CLI11's INI parser. Returned in reverse order as App::parse expects.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == "--config" && i + 1 < in.size()) {
      path = in[++i];
    } else if (in[i].rfind("--config=", 0) == 0) {
      path = in[i].substr(9);
    } else {
      out.push_back(in[i]);
    }
  }
  if (!path.empty() && !out.empty()) {
    std::vector<std::string> spliced{out.front()};
    for (const auto& item : CLI::ConfigINI().from_file(path)) {
      if (item.name == "config" || item.name.empty()) continue;
      spliced.push_back("--" + item.fullname());
      spliced.insert(spliced.end(), item.inputs.begin(), item.inputs.end());
    }
    spliced.insert(spliced.end(), out.begin() + 1, out.end());
    out = std::move(spliced);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and numerical verification for mean-field O(N) spin models", "onmf"};
  app.require_subcommand(1);
  // Config entries are spliced in ahead of the command line, so the last
  // (explicit) occurrence of a flag wins.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", ex::artifact_version());

  // thermo-scan
  auto* scan = app.add_subcommand("thermo-scan", "tabulate b, magnetization and free energy over beta");
  int scan_dim = 2;
  double beta_min = 0.0, beta_max = 4.0, beta_step = 0.05;
  std::string scan_out;
  scan->add_option("--dim", scan_dim, "spin dimension N")->check(CLI::Range(2, 64));
  scan->add_option("--beta-min", beta_min)->check(CLI::NonNegativeNumber);
  scan->add_option("--beta-max", beta_max);
  scan->add_option("--step", beta_step)->check(CLI::PositiveNumber);
  scan->add_option("--out", scan_out, "CSV path (default stdout)");

  // sample
  auto* sample = app.add_subcommand("sample", "run chains and record a W statistic");
  ManifestFlags sample_flags;
  std::string sample_out = "samples";
  add_manifest_flags(sample, sample_flags);
  sample->add_option("--out", sample_out, "output prefix: <prefix>.csv and <prefix>.summary.json");

  // limit-check
  auto* check = app.add_subcommand("limit-check", "compare a sample file with its limit law");
  std::string check_samples, check_summary, check_regime, check_out;
  check->add_option("--samples", check_samples, "CSV written by sample")->required();
  check->add_option("--summary", check_summary, "summary JSON (default <stem>.summary.json)");
  check->add_option("--regime", check_regime, "expected regime")->required();
  check->add_option("--out", check_out, "report JSON path (default stdout)");

  // stein-diagnostics
  auto* stein = app.add_subcommand("stein-diagnostics", "exchangeable-pair drift and variation regressions");
  ManifestFlags stein_flags;
  std::string stein_out;
  add_manifest_flags(stein, stein_flags);
  stein->add_option("--pairs", stein_flags.pairs, "pairs drawn per recorded configuration");
  stein->add_option("--out", stein_out, "prefix for <prefix>.json and <prefix>.bins.csv (default stdout)");

  // rate-function
  auto* rate = app.add_subcommand("rate-function", "tabulate Phi_beta and the rate function I_beta");
  int rate_dim = 2;
  double rate_beta = 1.0, r_max = 5.0;
  std::size_t rate_points = 101;
  rate->add_option("--dim", rate_dim)->check(CLI::Range(2, 64));
  rate->add_option("--beta", rate_beta)->check(CLI::NonNegativeNumber);
  rate->add_option("--r-max", r_max)->check(CLI::PositiveNumber);
  rate->add_option("--points", rate_points)->check(CLI::Range(2, 10000000));

  // density
  auto* density = app.add_subcommand("density", "tabulate the critical limit density");
  int density_dim = 3;
  double t_max = 0.0;
  std::size_t density_points = 201;
  density->add_option("--dim", density_dim)->check(CLI::Range(2, 64));
  density->add_option("--t-max", t_max, "upper end (default mode + 8 sd)");
  density->add_option("--points", density_points)->check(CLI::Range(2, 10000000));

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "estimate c_N = 1 / E[|S|^2 / n^{3/2}] at beta = N");
  ManifestFlags cal_flags;
  add_manifest_flags(cal, cal_flags);

  std::string config_file;
  for (auto* cmd : {scan, sample, check, stein, rate, density, cal}) {
    cmd->add_option("--config", config_file, "flat key=value file; explicit flags take precedence");
  }

  try {
    auto args = expand_config(argc, argv);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*scan) {
      const auto result = ex::thermo_scan(scan_dim, beta_min, beta_max, beta_step);
      std::ostringstream csv;
      ex::write_thermo_scan_csv(csv, result);
      if (scan_out.empty()) std::cout << csv.str(); else write_file(scan_out, csv.str());
      for (const auto& row : result.rows) {
        if (!row.ok) std::cerr << "beta=" << row.point.beta << ": " << row.error << '\n';
      }
      if (result.detected_beta_c) std::cerr << "detected beta_c = " << *result.detected_beta_c << '\n';
      return 0;
    }
    if (*sample) {
      const auto manifest = build_manifest(sample, sample_flags);
      const auto run = ex::run_sample(manifest);
      std::ostringstream csv;
      ex::write_samples_csv(csv, run);
      write_file(sample_out + ".csv", csv.str());
      write_file(sample_out + ".summary.json", ex::summary_json(run) + "\n");
      return 0;
    }
    if (*check) {
      std::ifstream in(check_samples);
      if (!in) throw UsageError("cannot read " + check_samples);
      auto run = ex::read_samples_csv(in);
      const std::string summary_path =
          check_summary.empty() ? stem_of(check_samples) + ".summary.json" : check_summary;
      run.manifest = ex::manifest_from_summary_json(slurp(summary_path));
      onmf::Regime regime;
      try {
        regime = onmf::regime_from_string(check_regime);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      ex::LimitCheckResult result;
      try {
        result = ex::limit_check(run, regime);
      } catch (const onmf::limits::RegimeError& e) {
        throw UsageError(e.what());
      }
      if (check_out.empty()) std::cout << result.to_json() << '\n';
      else write_file(check_out, result.to_json() + "\n");
      print_checks(result.checks);
      return result.passed() ? 0 : 1;
    }
    if (*stein) {
      auto manifest = build_manifest(stein, stein_flags);
      if (stein->count("--pairs") || stein_flags.manifest_file.empty()) {
        manifest.pairs_per_config = stein_flags.pairs;
      }
      const auto diag = ex::stein_diagnostics(manifest);
      if (stein_out.empty()) {
        std::cout << diag.to_json() << '\n';
      } else {
        write_file(stein_out + ".json", diag.to_json() + "\n");
        std::ostringstream bins;
        onmf::stats::write_binned_csv(bins, diag.drift_bins);
        write_file(stein_out + ".bins.csv", bins.str());
      }
      print_checks(diag.checks);
      return diag.passed() ? 0 : 1;
    }
    if (*rate) {
      ex::write_rate_table_csv(std::cout, rate_dim, rate_beta, r_max, rate_points);
      return 0;
    }
    if (*density) {
      if (t_max <= 0.0) {
        const auto d = onmf::limits::critical_density(density_dim);
        t_max = d.mode() + 8.0 * d.standard_deviation();
      }
      ex::write_density_table_csv(std::cout, density_dim, t_max, density_points);
      return 0;
    }
    if (*cal) {
      if (!cal->count("--beta") && cal_flags.manifest_file.empty()) {
        cal_flags.beta = cal_flags.dim;
      }
      cal_flags.statistic = "critical";
      const auto manifest = build_manifest(cal, cal_flags);
      std::cout << ex::calibrate(manifest).to_json() << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}
