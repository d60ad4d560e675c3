#pragma once

// Uniform and von Mises-Fisher sampling on S^{N-1}, single-site heat-bath
// (Glauber) dynamics for the mean-field Gibbs measure, and exchangeable pairs.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "onmf/limits.hpp"
#include "onmf/model.hpp"
#include "onmf/rng.hpp"

namespace onmf::sampler {

void uniform_sphere(Rng& rng, std::span<double> out);
std::vector<double> uniform_sphere(int dim, Rng& rng);

struct VmfCounters {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Draws theta with density proportional to exp(kappa <theta, mu>) w.r.t. the
/// uniform measure: the polar coordinate t = <theta, mu> by Wood's envelope
/// rejection, the tangent direction uniform on the equator. kappa = 0 falls
/// back to uniform_sphere. Throws std::domain_error on kappa < 0.
void vmf_sample(std::span<const double> mu, double kappa, Rng& rng, std::span<double> out,
                VmfCounters* counters = nullptr);
std::vector<double> vmf_sample(std::span<const double> mu, double kappa, Rng& rng);

SpinConfiguration random_configuration(int dim, std::int64_t n_sites, Rng& rng);

enum class InitialState { random, aligned };

/// One Markov chain. `rng` drives the dynamics; `pair_rng` is a separate
/// stream used only by make_pair, so drawing pairs never perturbs the chain.
struct ChainState {
  SpinConfiguration config;
  ModelParams params;
  Rng rng;
  Rng pair_rng;
  std::uint64_t sweep_count = 0;
  VmfCounters vmf;
};

/// Chain `chain_index` under `master_seed` uses streams 2c and 2c+1.
ChainState make_chain(const ModelParams& params, std::uint64_t master_seed,
                      std::uint64_t chain_index, InitialState start = InitialState::random);

/// Resamples `site` from its conditional law given the other spins.
void update_site(ChainState& state, std::int64_t site);
/// Resamples a uniformly chosen site.
void glauber_step(ChainState& state);
/// n updates in site order; increments sweep_count.
void gibbs_sweep(ChainState& state);
void run_sweeps(ChainState& state, std::uint64_t sweeps);

struct ExchangeablePairSample {
  std::vector<double> w_before;
  std::vector<double> w_after;
  Regime regime = Regime::subcritical;
};

/// W before and after one heat-bath update at a uniformly random site. The
/// configuration and the chain stream are left untouched; only pair_rng advances.
ExchangeablePairSample make_pair(ChainState& state, const limits::WStatistic& w);

/// Many pairs from one configuration, reduced on the fly. Since W is fixed
/// for a configuration, the per-configuration mean increment is all a
/// regression of E[W' - W | W] needs.
struct PairBatch {
  std::vector<double> w;
  std::vector<double> mean_dw;
  std::vector<double> mean_dw2;
  std::uint64_t count = 0;
};

PairBatch sample_pairs(ChainState& state, const limits::WStatistic& w, std::uint64_t count);

/// Chain checkpoint: the configuration as model CSV plus a JSON sidecar with
/// {seed, chain, params, sweep_count} and both generator states, so a resumed
/// chain continues the same stream bit for bit.
void write_checkpoint(const ChainState& state, std::uint64_t master_seed, std::uint64_t chain_index,
                      std::ostream& config_csv, std::ostream& sidecar_json);
ChainState read_checkpoint(std::istream& config_csv, std::istream& sidecar_json);

}  // namespace onmf::sampler
