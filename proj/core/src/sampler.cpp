#include "onmf/sampler.hpp"

#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>
#include <numbers>
#include <stdexcept>

namespace onmf::sampler {

namespace {

constexpr int kMaxDim = 64;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::domain_error("sampler: dimension must lie in [1, 64]");
}

double beta_symmetric(double shape, int dim, Rng& rng) {
  if (dim == 2) {
    // Beta(1/2, 1/2) is the arcsine law.
    const double s = std::sin(0.5 * std::numbers::pi * rng.uniform());
    return s * s;
  }
  if (dim == 3) return rng.uniform();
  const double x = rng.gamma(shape);
  const double y = rng.gamma(shape);
  return x / (x + y);
}

// Polar coordinate t = <theta, mu> with density ~ e^{kappa t}(1-t^2)^{(m-3)/2}.
double wood_polar(int m, double kappa, Rng& rng, VmfCounters* counters) {
  const double m1 = m - 1.0;
  const double b = m1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m1 * m1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + m1 * std::log(1.0 - x0 * x0);
  for (;;) {
    const double z = beta_symmetric(0.5 * m1, m, rng);
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = rng.uniform_positive();
    if (counters) ++counters->proposals;
    if (kappa * w + m1 * std::log(1.0 - x0 * w) - c >= std::log(u)) {
      if (counters) ++counters->accepted;
      return w;
    }
  }
}

}  // namespace

void uniform_sphere(Rng& rng, std::span<double> out) {
  const int dim = static_cast<int>(out.size());
  check_dim(dim);
  if (dim == 1) {
    out[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return;
  }
  for (;;) {
    double sq = 0.0;
    for (auto& x : out) {
      x = rng.normal();
      sq += x * x;
    }
    if (sq > 1e-300) {
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& x : out) x *= inv;
      return;
    }
  }
}

std::vector<double> uniform_sphere(int dim, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(dim));
  uniform_sphere(rng, out);
  return out;
}

void vmf_sample(std::span<const double> mu, double kappa, Rng& rng, std::span<double> out,
                VmfCounters* counters) {
  const int dim = static_cast<int>(mu.size());
  check_dim(dim);
  if (out.size() != mu.size()) throw std::invalid_argument("vmf_sample: size mismatch");
  if (!(kappa >= 0.0)) throw std::domain_error("vmf_sample: kappa must be >= 0");
  if (kappa == 0.0 || dim == 1) {
    if (dim == 1 && kappa > 0.0) {
      // Two-point law on {-mu, +mu}.
      const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * kappa));
      out[0] = (rng.uniform() < p_plus ? 1.0 : -1.0) * mu[0];
      return;
    }
    uniform_sphere(rng, out);
    return;
  }
  const double t = wood_polar(dim, kappa, rng, counters);
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  if (dim == 2) {
    const double sign = (rng.engine()() >> 63) ? 1.0 : -1.0;
    out[0] = t * mu[0] - sign * s * mu[1];
    out[1] = t * mu[1] + sign * s * mu[0];
  } else {
    double xi[kMaxDim];
    double sq = 0.0;
    do {
      double along = 0.0;
      for (int k = 0; k < dim; ++k) {
        xi[k] = rng.normal();
        along += xi[k] * mu[k];
      }
      sq = 0.0;
      for (int k = 0; k < dim; ++k) {
        xi[k] -= along * mu[k];
        sq += xi[k] * xi[k];
      }
    } while (sq < 1e-300);
    const double inv = s / std::sqrt(sq);
    for (int k = 0; k < dim; ++k) out[k] = t * mu[k] + inv * xi[k];
  }
  double norm2 = 0.0;
  for (int k = 0; k < dim; ++k) norm2 += out[k] * out[k];
  const double inv = 1.0 / std::sqrt(norm2);
  for (int k = 0; k < dim; ++k) out[k] *= inv;
}

std::vector<double> vmf_sample(std::span<const double> mu, double kappa, Rng& rng) {
  std::vector<double> out(mu.size());
  vmf_sample(mu, kappa, rng, out);
  return out;
}

SpinConfiguration random_configuration(int dim, std::int64_t n_sites, Rng& rng) {
  std::vector<double> flat(static_cast<std::size_t>(dim * n_sites));
  for (std::int64_t i = 0; i < n_sites; ++i) {
    uniform_sphere(rng, std::span<double>(flat.data() + i * dim, static_cast<std::size_t>(dim)));
  }
  return SpinConfiguration(dim, std::move(flat));
}

ChainState make_chain(const ModelParams& params, std::uint64_t master_seed,
                      std::uint64_t chain_index, InitialState start) {
  params.validate();
  Rng rng = Rng::for_stream(master_seed, 2 * chain_index);
  Rng pair_rng = Rng::for_stream(master_seed, 2 * chain_index + 1);
  SpinConfiguration config = start == InitialState::aligned
                                 ? aligned_configuration(params.dim, params.n_sites)
                                 : random_configuration(params.dim, params.n_sites, rng);
  return ChainState{std::move(config), params, rng, pair_rng, 0, {}};
}

namespace {

// Heat-bath proposal for `site` given the others; writes the new spin.
void conditional_draw(const SpinConfiguration& config, const ModelParams& params,
                      std::int64_t site, Rng& rng, std::span<double> out, VmfCounters* counters) {
  const int dim = params.dim;
  double rest[kMaxDim];
  config.leave_one_out(site, std::span<double>(rest, static_cast<std::size_t>(dim)));
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += rest[k] * rest[k];
  const double r = std::sqrt(r2);
  const double kappa = params.beta * r / static_cast<double>(params.n_sites);
  if (r == 0.0 || kappa == 0.0) {
    uniform_sphere(rng, out);
    return;
  }
  for (int k = 0; k < dim; ++k) rest[k] /= r;
  vmf_sample(std::span<const double>(rest, static_cast<std::size_t>(dim)), kappa, rng, out,
             counters);
}

}  // namespace

void update_site(ChainState& state, std::int64_t site) {
  double fresh[kMaxDim];
  const auto out = std::span<double>(fresh, static_cast<std::size_t>(state.params.dim));
  conditional_draw(state.config, state.params, site, state.rng, out, &state.vmf);
  state.config.replace_spin(site, out);
}

void glauber_step(ChainState& state) {
  update_site(state, static_cast<std::int64_t>(
                         state.rng.index(static_cast<std::uint64_t>(state.params.n_sites))));
}

void gibbs_sweep(ChainState& state) {
  for (std::int64_t i = 0; i < state.params.n_sites; ++i) update_site(state, i);
  ++state.sweep_count;
}

void run_sweeps(ChainState& state, std::uint64_t sweeps) {
  for (std::uint64_t s = 0; s < sweeps; ++s) gibbs_sweep(state);
}

ExchangeablePairSample make_pair(ChainState& state, const limits::WStatistic& w) {
  const int dim = state.params.dim;
  const auto site = static_cast<std::int64_t>(
      state.pair_rng.index(static_cast<std::uint64_t>(state.params.n_sites)));
  std::vector<double> fresh(static_cast<std::size_t>(dim));
  conditional_draw(state.config, state.params, site, state.pair_rng, fresh, nullptr);

  const auto total = state.config.total_spin();
  const auto old_spin = state.config.spin(site);
  std::vector<double> moved(total.begin(), total.end());
  for (int k = 0; k < dim; ++k) moved[k] += fresh[k] - old_spin[k];

  ExchangeablePairSample pair;
  pair.regime = w.regime();
  pair.w_before = w.evaluate(total);
  pair.w_after = w.evaluate(moved);
  return pair;
}

PairBatch sample_pairs(ChainState& state, const limits::WStatistic& w, std::uint64_t count) {
  const int dim = state.params.dim;
  const int m = w.components();
  PairBatch batch;
  batch.w = w.evaluate(state.config.total_spin());
  batch.mean_dw.assign(static_cast<std::size_t>(m), 0.0);
  batch.mean_dw2.assign(static_cast<std::size_t>(m), 0.0);
  batch.count = count;
  if (count == 0) return batch;

  const auto total = state.config.total_spin();
  double fresh[kMaxDim];
  double moved[kMaxDim];
  double after[kMaxDim];
  const auto fresh_span = std::span<double>(fresh, static_cast<std::size_t>(dim));
  const auto moved_span = std::span<const double>(moved, static_cast<std::size_t>(dim));
  const auto after_span = std::span<double>(after, static_cast<std::size_t>(m));
  const auto n = static_cast<std::uint64_t>(state.params.n_sites);
  for (std::uint64_t p = 0; p < count; ++p) {
    const auto site = static_cast<std::int64_t>(state.pair_rng.index(n));
    conditional_draw(state.config, state.params, site, state.pair_rng, fresh_span, nullptr);
    const auto old_spin = state.config.spin(site);
    for (int k = 0; k < dim; ++k) moved[k] = total[k] + fresh[k] - old_spin[k];
    w.evaluate(moved_span, after_span);
    for (int j = 0; j < m; ++j) {
      const double d = after[j] - batch.w[static_cast<std::size_t>(j)];
      batch.mean_dw[static_cast<std::size_t>(j)] += d;
      batch.mean_dw2[static_cast<std::size_t>(j)] += d * d;
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (int j = 0; j < m; ++j) {
    batch.mean_dw[static_cast<std::size_t>(j)] *= inv;
    batch.mean_dw2[static_cast<std::size_t>(j)] *= inv;
  }
  return batch;
}

void write_checkpoint(const ChainState& state, std::uint64_t master_seed, std::uint64_t chain_index,
                      std::ostream& config_csv, std::ostream& sidecar_json) {
  write_configuration_csv(config_csv, state.config);
  nlohmann::ordered_json j;
  j["seed"] = master_seed;
  j["chain"] = chain_index;
  j["params"] = {{"dim", state.params.dim},
                 {"beta", state.params.beta},
                 {"n_sites", state.params.n_sites}};
  j["sweep_count"] = state.sweep_count;
  j["total_spin"] = std::vector<double>(state.config.total_spin().begin(),
                                        state.config.total_spin().end());
  j["since_recompute"] = state.config.replacements_since_recompute();
  j["rng"] = state.rng.state();
  j["pair_rng"] = state.pair_rng.state();
  j["vmf"] = {{"proposals", state.vmf.proposals}, {"accepted", state.vmf.accepted}};
  sidecar_json << j.dump(2) << '\n';
}

ChainState read_checkpoint(std::istream& config_csv, std::istream& sidecar_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(std::string(std::istreambuf_iterator<char>(sidecar_json), {}));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("read_checkpoint: ") + e.what());
  }
  ModelParams params;
  params.dim = j.at("params").at("dim").get<int>();
  params.beta = j.at("params").at("beta").get<double>();
  params.n_sites = j.at("params").at("n_sites").get<std::int64_t>();
  params.validate();
  auto config = read_configuration_csv(config_csv);
  if (config.dim() != params.dim || config.size() != params.n_sites) {
    throw std::invalid_argument("read_checkpoint: configuration does not match params");
  }
  config.restore_cached_total(j.at("total_spin").get<std::vector<double>>(),
                              j.at("since_recompute").get<std::uint32_t>());
  ChainState state{std::move(config), params, Rng(), Rng(), j.at("sweep_count").get<std::uint64_t>(), {}};
  state.rng.restore(j.at("rng").get<std::string>());
  state.pair_rng.restore(j.at("pair_rng").get<std::string>());
  state.vmf.proposals = j.at("vmf").at("proposals").get<std::uint64_t>();
  state.vmf.accepted = j.at("vmf").at("accepted").get<std::uint64_t>();
  return state;
}

}  // namespace onmf::sampler
