#include "onmf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "onmf/specfun.hpp"

#ifndef ONMF_VERSION
#define ONMF_VERSION "0.0.0"
#endif

namespace onmf::experiment {

using nlohmann::ordered_json;

std::string artifact_version() { return ONMF_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string start_name(sampler::InitialState s) {
  return s == sampler::InitialState::aligned ? "aligned" : "random";
}

sampler::InitialState start_from(const std::string& s) {
  if (s == "aligned") return sampler::InitialState::aligned;
  if (s == "random") return sampler::InitialState::random;
  throw std::invalid_argument("unknown start '" + s + "'");
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json j;
  j["master_seed"] = m.master_seed;
  j["params"] = {{"dim", m.params.dim}, {"beta", m.params.beta}, {"n_sites", m.params.n_sites}};
  j["chains"] = m.chains;
  j["burn_in_sweeps"] = m.burn_in_sweeps;
  j["thin_sweeps"] = m.thin_sweeps;
  j["samples_per_chain"] = m.samples_per_chain;
  j["pairs_per_config"] = m.pairs_per_config;
  j["statistic"] = to_string(m.statistic);
  j["c_N"] = m.c_N;
  j["start"] = start_name(m.start);
  j["artifact_version"] = m.artifact_version;
  return j;
}

ordered_json summary_obj(const stats::EmpiricalSummary& s) { return ordered_json::parse(s.to_json()); }

ordered_json checks_json(const std::vector<Check>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  }
  return arr;
}

}  // namespace

void RunManifest::validate() const {
  params.validate();
  if (chains < 1) throw std::invalid_argument("manifest: chains must be >= 1");
  if (thin_sweeps < 1) throw std::invalid_argument("manifest: thin_sweeps must be >= 1");
  if (samples_per_chain < 1) throw std::invalid_argument("manifest: samples_per_chain must be >= 1");
  if (!(c_N > 0.0)) throw std::invalid_argument("manifest: c_N must be > 0");
  if (params.regime() != statistic) {
    throw limits::RegimeError("manifest: " + to_string(statistic) +
                              " statistic requested but (N, beta) = (" +
                              std::to_string(params.dim) + ", " + format_double(params.beta) +
                              ") is " + to_string(params.regime()));
  }
}

std::string RunManifest::to_json() const { return manifest_json(*this).dump(2); }

RunManifest RunManifest::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunManifest m;
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.params.dim = j.at("params").at("dim").get<int>();
  m.params.beta = j.at("params").at("beta").get<double>();
  m.params.n_sites = j.at("params").at("n_sites").get<std::int64_t>();
  m.chains = j.at("chains").get<std::uint64_t>();
  m.burn_in_sweeps = j.at("burn_in_sweeps").get<std::uint64_t>();
  m.thin_sweeps = j.at("thin_sweeps").get<std::uint64_t>();
  m.samples_per_chain = j.at("samples_per_chain").get<std::uint64_t>();
  m.pairs_per_config = j.value("pairs_per_config", std::uint64_t{1000});
  m.statistic = regime_from_string(j.at("statistic").get<std::string>());
  m.c_N = j.value("c_N", 1.0);
  m.start = start_from(j.value("start", std::string("random")));
  m.artifact_version = j.value("artifact_version", experiment::artifact_version());
  return m;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ONMF_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) workers = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(workers, jobs));
}

void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> SampleRun::component(int j) const {
  std::vector<double> out;
  for (const auto& c : chains) {
    for (std::size_t i = static_cast<std::size_t>(j); i < c.values.size();
         i += static_cast<std::size_t>(components)) {
      out.push_back(c.values[i]);
    }
  }
  return out;
}

std::vector<double> SampleRun::squared_norms() const {
  std::vector<double> out;
  const auto m = static_cast<std::size_t>(components);
  for (const auto& c : chains) {
    for (std::size_t i = 0; i + m <= c.values.size(); i += m) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += c.values[i + k] * c.values[i + k];
      out.push_back(s);
    }
  }
  return out;
}

SampleRun run_sample(const RunManifest& manifest) {
  manifest.validate();
  const auto w = limits::WStatistic::for_regime(manifest.statistic, manifest.params, manifest.c_N);
  SampleRun run;
  run.manifest = manifest;
  run.components = w.components();
  run.chains.resize(manifest.chains);
  parallel_for(manifest.chains, [&](std::size_t c) {
    auto state = sampler::make_chain(manifest.params, manifest.master_seed, c, manifest.start);
    sampler::run_sweeps(state, manifest.burn_in_sweeps);
    ChainSamples out;
    out.chain = c;
    out.values.reserve(manifest.samples_per_chain * static_cast<std::size_t>(run.components));
    std::vector<double> buf(static_cast<std::size_t>(run.components));
    for (std::uint64_t s = 0; s < manifest.samples_per_chain; ++s) {
      sampler::run_sweeps(state, manifest.thin_sweeps);
      w.evaluate(state.config.total_spin(), buf);
      out.values.insert(out.values.end(), buf.begin(), buf.end());
      out.sweeps.push_back(state.sweep_count);
    }
    out.vmf_acceptance = state.vmf.acceptance_rate();
    run.chains[c] = std::move(out);
  });
  return run;
}

void write_samples_csv(std::ostream& out, const SampleRun& run) {
  out << "chain,sweep";
  if (run.components == 1) {
    out << ",w";
  } else {
    for (int k = 1; k <= run.components; ++k) out << ",w" << k;
  }
  out << '\n';
  const auto m = static_cast<std::size_t>(run.components);
  for (const auto& c : run.chains) {
    for (std::size_t s = 0; s < c.sweeps.size(); ++s) {
      out << c.chain << ',' << c.sweeps[s];
      for (std::size_t k = 0; k < m; ++k) out << ',' << format_double(c.values[s * m + k]);
      out << '\n';
    }
  }
}

SampleRun read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("chain,sweep,", 0) != 0) {
    throw std::runtime_error("samples csv: missing header chain,sweep,...");
  }
  SampleRun run;
  run.components = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 1;
  const auto m = static_cast<std::size_t>(run.components);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    const auto chain = std::stoull(cell);
    std::getline(row, cell, ',');
    const auto sweep = std::stoull(cell);
    if (run.chains.empty() || run.chains.back().chain != chain) {
      run.chains.push_back(ChainSamples{chain, {}, {}, 1.0});
    }
    auto& c = run.chains.back();
    c.sweeps.push_back(sweep);
    std::size_t count = 0;
    while (std::getline(row, cell, ',')) {
      c.values.push_back(std::stod(cell));
      ++count;
    }
    if (count != m) throw std::runtime_error("samples csv: wrong column count");
  }
  return run;
}

std::string summary_json(const SampleRun& run) {
  ordered_json j;
  j["manifest"] = manifest_json(run.manifest);
  ordered_json comps = ordered_json::array();
  for (int k = 0; k < run.components; ++k) {
    comps.push_back(summary_obj(stats::summarize(run.component(k))));
  }
  j["components"] = comps;
  if (run.components > 1) j["squared_norm"] = summary_obj(stats::summarize(run.squared_norms()));
  ordered_json acc = ordered_json::array();
  for (const auto& c : run.chains) acc.push_back(c.vmf_acceptance);
  j["vmf_acceptance"] = acc;
  return j.dump(2);
}

RunManifest manifest_from_summary_json(const std::string& text) {
  return RunManifest::from_json(nlohmann::json::parse(text).at("manifest").dump());
}

bool LimitCheckResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string LimitCheckResult::to_json() const {
  ordered_json j;
  j["regime"] = to_string(regime);
  ordered_json d = ordered_json::array();
  for (const auto& r : distances) d.push_back(ordered_json::parse(r.to_json()));
  j["distances"] = d;
  j["moment"] = moment;
  j["moment_target"] = moment_target;
  j["checks"] = checks_json(checks);
  j["passed"] = passed();
  return j.dump(2);
}

LimitCheckResult limit_check(const SampleRun& run, Regime regime,
                             const LimitThresholds& th, std::size_t replicates) {
  const auto& params = run.manifest.params;
  if (params.regime() != regime || run.manifest.statistic != regime) {
    throw limits::RegimeError("limit_check: samples are not from the " + to_string(regime) +
                              " regime");
  }
  LimitCheckResult res;
  res.regime = regime;
  switch (regime) {
    case Regime::subcritical: {
      const auto law = limits::LimitLaw::gaussian_vector(params.dim);
      for (int k = 0; k < run.components; ++k) {
        res.distances.push_back(stats::compare_to_law(run.component(k), law, replicates));
      }
      const auto sq = run.squared_norms();
      res.moment = stats::summarize(sq).mean;
      res.moment_target = params.dim;
      res.checks.push_back({"ks_component_1", res.distances[0].ks, th.ks_subcritical,
                            res.distances[0].ks <= th.ks_subcritical});
      const double rel = std::abs(res.moment / res.moment_target - 1.0);
      res.checks.push_back({"second_moment_rel_error", rel, th.second_moment_rel,
                            rel <= th.second_moment_rel});
      break;
    }
    case Regime::supercritical: {
      const double var = thermo::supercritical_variance(params.dim, params.beta);
      const auto law = limits::LimitLaw::gaussian_scalar(var);
      const auto w = run.component(0);
      res.distances.push_back(stats::compare_to_law(w, law, replicates));
      res.moment = stats::summarize(w).variance;
      res.moment_target = var;
      res.checks.push_back({"ks", res.distances[0].ks, th.ks_supercritical,
                            res.distances[0].ks <= th.ks_supercritical});
      const double rel = std::abs(res.moment / var - 1.0);
      res.checks.push_back({"variance_rel_error", rel, th.variance_rel, rel <= th.variance_rel});
      break;
    }
    case Regime::critical: {
      auto w = run.component(0);
      const double mean = stats::summarize(w).mean;
      if (!(mean > 0.0)) throw limits::DegenerateError("limit_check: non-positive mean");
      for (auto& x : w) x /= mean;
      const auto law = limits::LimitLaw::critical_standardized(params.dim);
      res.distances.push_back(stats::compare_to_law(w, law, replicates));
      // Ratio E W^2 / (E W)^2 against E X^2 / (E X)^2.
      const auto d = limits::critical_density(params.dim);
      double s2 = 0.0;
      for (double x : w) s2 += x * x;
      res.moment = s2 / static_cast<double>(w.size());
      res.moment_target = d.second_moment() / (d.mean() * d.mean());
      res.checks.push_back({"ks_standardized", res.distances[0].ks, th.ks_critical,
                            res.distances[0].ks <= th.ks_critical});
      break;
    }
  }
  return res;
}

bool SteinDiagnostics::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

double SteinDiagnostics::prediction(const std::string& name) const {
  for (const auto& [k, v] : predictions) {
    if (k == name) return v;
  }
  throw std::out_of_range("SteinDiagnostics: no prediction '" + name + "'");
}

std::string SteinDiagnostics::to_json() const {
  ordered_json j;
  j["regime"] = to_string(regime);
  j["c_N"] = c_N;
  j["drift"] = ordered_json::parse(drift.to_json());
  j["quadratic_variation"] = ordered_json::parse(variation.to_json());
  ordered_json p;
  for (const auto& [k, v] : predictions) p[k] = v;
  j["predictions"] = p;
  j["checks"] = checks_json(checks);
  j["passed"] = passed();
  return j.dump(2);
}

namespace {

Check within_se(const std::string& name, double estimate, double se, double target, double k) {
  const double z = std::abs(estimate - target) / se;
  return {name, z, k, z <= k};
}

Check within_rel(const std::string& name, double estimate, double target, double tol) {
  const double rel = std::abs(estimate / target - 1.0);
  return {name, rel, tol, rel <= tol};
}

}  // namespace

SteinDiagnostics stein_diagnostics(const RunManifest& manifest) {
  manifest.validate();
  const auto& params = manifest.params;
  const Regime regime = manifest.statistic;
  // The critical statistic is recorded at c_N = 1 and rescaled afterwards.
  const auto w = limits::WStatistic::for_regime(regime, params, 1.0);

  std::vector<std::vector<sampler::PairBatch>> per_chain(manifest.chains);
  parallel_for(manifest.chains, [&](std::size_t c) {
    auto state = sampler::make_chain(params, manifest.master_seed, c, manifest.start);
    sampler::run_sweeps(state, manifest.burn_in_sweeps);
    auto& out = per_chain[c];
    out.reserve(manifest.samples_per_chain);
    for (std::uint64_t s = 0; s < manifest.samples_per_chain; ++s) {
      sampler::run_sweeps(state, manifest.thin_sweeps);
      out.push_back(sampler::sample_pairs(state, w, manifest.pairs_per_config));
    }
  });

  SteinDiagnostics diag;
  diag.regime = regime;
  double scale = 1.0;
  if (regime == Regime::critical) {
    std::vector<double> t;
    for (const auto& chain : per_chain) {
      for (const auto& b : chain) t.push_back(b.w[0]);
    }
    double sum = 0.0;
    for (double x : t) sum += x;
    scale = static_cast<double>(t.size()) / sum;
    diag.c_N = scale;
  }
  for (const auto& chain : per_chain) {
    for (const auto& b : chain) {
      for (std::size_t k = 0; k < b.w.size(); ++k) {
        diag.drift_points.push_back({scale * b.w[k], scale * b.mean_dw[k]});
        diag.variation_points.push_back({scale * b.w[k], scale * scale * b.mean_dw2[k]});
      }
    }
  }
  diag.drift_bins = stats::binned_means(diag.drift_points, 50);

  const double n = static_cast<double>(params.n_sites);
  const double N = params.dim;
  switch (regime) {
    case Regime::subcritical: {
      const double lambda = (1.0 - params.beta / N) / n;
      diag.drift = stats::drift_regression(diag.drift_points, stats::DriftModel::linear_through_origin);
      diag.variation = stats::quadratic_variation_regression(diag.variation_points,
                                                             stats::VariationModel::constant);
      diag.predictions = {{"lambda", lambda}, {"two_lambda", 2.0 * lambda}};
      diag.checks.push_back(within_se("drift_lambda_z", diag.drift.coefficient("lambda"),
                                      diag.drift.standard_error("lambda"), lambda, 3.0));
      diag.checks.push_back(within_rel("variation_rel_error", diag.variation.coefficient("constant"),
                                       2.0 * lambda, 0.15));
      break;
    }
    case Regime::supercritical: {
      const double b = thermo::solve_fixed_point(params.dim, params.beta);
      const double fp = specfun::bessel_ratio_derivative(params.dim, b);
      const double lambda = (1.0 - params.beta * fp) / n;
      const double var = thermo::supercritical_variance(params.dim, params.beta);
      diag.drift = stats::drift_regression(diag.drift_points, stats::DriftModel::linear);
      diag.variation = stats::quadratic_variation_regression(diag.variation_points,
                                                             stats::VariationModel::constant);
      diag.predictions = {{"lambda", lambda}, {"two_lambda_var", 2.0 * lambda * var}};
      diag.checks.push_back(within_se("drift_lambda_z", diag.drift.coefficient("lambda"),
                                      diag.drift.standard_error("lambda"), lambda, 3.0));
      diag.checks.push_back(within_rel("variation_rel_error", diag.variation.coefficient("constant"),
                                       2.0 * lambda * var, 0.15));
      break;
    }
    case Regime::critical: {
      const double k = diag.c_N / (N * std::pow(n, 1.5));
      const double c = N / ((N + 2.0) * diag.c_N * diag.c_N);
      diag.drift = stats::drift_regression(diag.drift_points, stats::DriftModel::quadratic);
      diag.variation = stats::quadratic_variation_regression(diag.variation_points,
                                                             stats::VariationModel::proportional);
      // W' = W(sigma') changes |S|^2 by 2<sigma^{(I)}, sigma'_I - sigma_I>, twice the
      // one-sided increment; the amplitudes are 2Nk and 8k for this pair.
      diag.predictions = {{"k", k},
                          {"c", c},
                          {"alpha_one_sided", N * k},
                          {"alpha", 2.0 * N * k},
                          {"variation_slope", 8.0 * k}};
      diag.checks.push_back(within_rel("drift_c_rel_error", diag.drift.coefficient("c"), c, 0.15));
      diag.checks.push_back(within_rel("drift_alpha_rel_error", diag.drift.coefficient("alpha"),
                                       2.0 * N * k, 0.15));
      diag.checks.push_back(within_rel("variation_slope_rel_error", diag.variation.coefficient("k"),
                                       8.0 * k, 0.15));
      break;
    }
  }
  return diag;
}

ThermoScan thermo_scan(int dim, double beta_min, double beta_max, double step, double tolerance) {
  if (!(beta_min >= 0.0 && beta_max > beta_min && step > 0.0)) {
    throw std::invalid_argument("thermo_scan: need 0 <= beta_min < beta_max and step > 0");
  }
  ThermoScan scan;
  const auto count = static_cast<std::size_t>(std::floor((beta_max - beta_min) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double beta = beta_min + static_cast<double>(i) * step;
    ThermoScanRow row;
    try {
      row.point = thermo::phase_point(dim, beta);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.point.dim = dim;
      row.point.beta = beta;
    }
    if (row.ok && !scan.detected_beta_c && row.point.b > tolerance) scan.detected_beta_c = beta;
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

void write_thermo_scan_csv(std::ostream& out, const ThermoScan& scan) {
  out << "beta,b,magnetization,free_energy,phi_second_deriv\n";
  for (const auto& row : scan.rows) {
    const auto& p = row.point;
    out << format_double(p.beta);
    if (row.ok) {
      out << ',' << format_double(p.b) << ',' << format_double(p.magnetization) << ','
          << format_double(p.free_energy) << ',' << format_double(p.phi_second_deriv);
    } else {
      out << ",nan,nan,nan,nan";
    }
    out << '\n';
  }
}

void write_rate_table_csv(std::ostream& out, int dim, double beta, double r_max, std::size_t points) {
  if (points < 2 || !(r_max > 0.0)) throw std::invalid_argument("rate table: need r_max > 0, points >= 2");
  out << "r,phi,rate\n";
  const double inf = thermo::free_energy(dim, beta);
  for (std::size_t i = 0; i < points; ++i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(points - 1);
    const double p = thermo::phi(dim, beta, r);
    out << format_double(r) << ',' << format_double(p) << ',' << format_double(std::max(0.0, p - inf))
        << '\n';
  }
}

void write_density_table_csv(std::ostream& out, int dim, double t_max, std::size_t points) {
  if (points < 2 || !(t_max > 0.0)) throw std::invalid_argument("density table: need t_max > 0, points >= 2");
  const auto d = limits::critical_density(dim);
  out << "t,pdf,cdf\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    out << format_double(t) << ',' << format_double(d.pdf(t)) << ',' << format_double(d.cdf(t)) << '\n';
  }
}

std::string Calibration::to_json() const {
  ordered_json j;
  j["c_N"] = c_N;
  j["mean"] = mean;
  j["mean_standard_error"] = mean_standard_error;
  j["samples"] = samples;
  return j.dump(2);
}

Calibration calibrate(const RunManifest& manifest) {
  RunManifest m = manifest;
  m.statistic = Regime::critical;
  m.c_N = 1.0;
  const auto run = run_sample(m);
  const auto t = run.component(0);
  Calibration cal;
  cal.c_N = limits::calibrate_c_N(t);
  const auto s = stats::summarize(t);
  cal.mean = s.mean;
  cal.mean_standard_error = s.mean_standard_error;
  cal.samples = t.size();
  return cal;
}

}  // namespace onmf::experiment
