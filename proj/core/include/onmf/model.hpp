#pragma once

// Configurations of n unit spins in R^N with a cached total spin, and the
// mean-field Hamiltonian H = -|S|^2 / (2n).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace onmf {

enum class Regime { subcritical, critical, supercritical };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

/// beta == N exactly (to 1e-12) is critical.
Regime regime_of(int dim, double beta);

struct ModelParams {
  int dim = 2;
  double beta = 0.0;
  std::int64_t n_sites = 2;

  /// Throws std::invalid_argument unless dim >= 2, beta >= 0, n_sites >= 2.
  void validate() const;
  Regime regime() const { return regime_of(dim, beta); }
};

class SpinConfiguration {
public:
  /// Every spin starts at the first basis vector.
  SpinConfiguration(int dim, std::int64_t n_sites);
  /// Takes a flat row-major buffer of n_sites x dim unit vectors.
  SpinConfiguration(int dim, std::vector<double> flat_spins);

  int dim() const { return dim_; }
  std::int64_t size() const { return n_; }

  std::span<const double> spin(std::int64_t site) const;
  std::span<const double> total_spin() const { return total_; }
  std::span<const double> flat() const { return spins_; }
  double total_spin_squared() const;

  /// Overwrites one spin and updates the cached total incrementally; the
  /// total is recomputed from scratch every 2^16 replacements.
  void replace_spin(std::int64_t site, std::span<const double> new_spin);

  /// sigma^{(i)} = S - sigma_i.
  std::vector<double> leave_one_out(std::int64_t site) const;
  void leave_one_out(std::int64_t site, std::span<double> out) const;

  void recompute_total();

  /// Incremental-cache bookkeeping, exposed so a checkpoint can restore the
  /// cached total exactly rather than re-summing it.
  std::uint32_t replacements_since_recompute() const { return since_recompute_; }
  /// Throws std::invalid_argument if `total` is not within 1e-9 n of the sum.
  void restore_cached_total(std::span<const double> total, std::uint32_t since_recompute);

  /// Largest | |sigma_i| - 1 | over the sites.
  double max_norm_error() const;

  static constexpr std::uint32_t kRecomputeInterval = 1u << 16;

private:
  void check_site(std::int64_t site) const;

  int dim_;
  std::int64_t n_;
  std::vector<double> spins_;
  std::vector<double> total_;
  std::uint32_t since_recompute_ = 0;
};

/// -|S|^2 / (2n).
double hamiltonian(const SpinConfiguration& config);

/// All spins equal to `direction` (normalized); defaults to e_1.
SpinConfiguration aligned_configuration(int dim, std::int64_t n_sites,
                                        std::span<const double> direction = {});

/// CSV with header site,x1,...,xN and one row per spin, full precision.
void write_configuration_csv(std::ostream& out, const SpinConfiguration& config);
SpinConfiguration read_configuration_csv(std::istream& in);

}  // namespace onmf
