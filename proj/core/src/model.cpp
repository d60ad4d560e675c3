#include "onmf/model.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace onmf {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::subcritical:
      return "subcritical";
    case Regime::critical:
      return "critical";
    case Regime::supercritical:
      return "supercritical";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& name) {
  if (name == "subcritical") return Regime::subcritical;
  if (name == "critical") return Regime::critical;
  if (name == "supercritical") return Regime::supercritical;
  throw std::invalid_argument("unknown regime '" + name + "'");
}

Regime regime_of(int dim, double beta) {
  if (std::abs(beta - dim) <= 1e-12) return Regime::critical;
  return beta < dim ? Regime::subcritical : Regime::supercritical;
}

void ModelParams::validate() const {
  if (dim < 2) throw std::invalid_argument("ModelParams: dim must be >= 2");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("ModelParams: beta must be finite and >= 0");
  }
  if (n_sites < 2) throw std::invalid_argument("ModelParams: n_sites must be >= 2");
}

SpinConfiguration::SpinConfiguration(int dim, std::int64_t n_sites)
    : dim_(dim), n_(n_sites), spins_(static_cast<std::size_t>(dim * n_sites), 0.0),
      total_(static_cast<std::size_t>(dim), 0.0) {
  if (dim < 1 || n_sites < 1) {
    throw std::invalid_argument("SpinConfiguration: dim and n_sites must be positive");
  }
  for (std::int64_t i = 0; i < n_; ++i) {
    spins_[static_cast<std::size_t>(i * dim_)] = 1.0;
  }
  total_[0] = static_cast<double>(n_);
}

SpinConfiguration::SpinConfiguration(int dim, std::vector<double> flat_spins)
    : dim_(dim), spins_(std::move(flat_spins)), total_(static_cast<std::size_t>(dim), 0.0) {
  if (dim < 1 || spins_.empty() || spins_.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("SpinConfiguration: buffer is not n_sites x dim");
  }
  n_ = static_cast<std::int64_t>(spins_.size()) / dim_;
  if (max_norm_error() > 1e-12) {
    throw std::invalid_argument("SpinConfiguration: spins must have unit norm");
  }
  recompute_total();
}

void SpinConfiguration::check_site(std::int64_t site) const {
  if (site < 0 || site >= n_) {
    throw std::out_of_range("SpinConfiguration: site " + std::to_string(site) +
                            " out of range");
  }
}

std::span<const double> SpinConfiguration::spin(std::int64_t site) const {
  check_site(site);
  return {spins_.data() + site * dim_, static_cast<std::size_t>(dim_)};
}

double SpinConfiguration::total_spin_squared() const {
  double s = 0.0;
  for (double x : total_) s += x * x;
  return s;
}

void SpinConfiguration::replace_spin(std::int64_t site, std::span<const double> new_spin) {
  check_site(site);
  if (new_spin.size() != static_cast<std::size_t>(dim_)) {
    throw std::invalid_argument("replace_spin: wrong dimension");
  }
  double norm2 = 0.0;
  for (double x : new_spin) norm2 += x * x;
  if (!(std::abs(norm2 - 1.0) <= 2e-12)) {
    throw std::invalid_argument("replace_spin: new spin must have unit norm");
  }
  double* s = spins_.data() + site * dim_;
  for (int k = 0; k < dim_; ++k) {
    total_[k] += new_spin[k] - s[k];
    s[k] = new_spin[k];
  }
  if (++since_recompute_ >= kRecomputeInterval) {
    recompute_total();
  }
}

std::vector<double> SpinConfiguration::leave_one_out(std::int64_t site) const {
  std::vector<double> out(static_cast<std::size_t>(dim_));
  leave_one_out(site, out);
  return out;
}

void SpinConfiguration::leave_one_out(std::int64_t site, std::span<double> out) const {
  check_site(site);
  const double* s = spins_.data() + site * dim_;
  for (int k = 0; k < dim_; ++k) out[k] = total_[k] - s[k];
}

void SpinConfiguration::recompute_total() {
  std::fill(total_.begin(), total_.end(), 0.0);
  for (std::int64_t i = 0; i < n_; ++i) {
    const double* s = spins_.data() + i * dim_;
    for (int k = 0; k < dim_; ++k) total_[k] += s[k];
  }
  since_recompute_ = 0;
}

void SpinConfiguration::restore_cached_total(std::span<const double> total,
                                             std::uint32_t since_recompute) {
  if (total.size() != total_.size()) {
    throw std::invalid_argument("restore_cached_total: wrong dimension");
  }
  std::vector<double> fresh(total_.size(), 0.0);
  for (std::int64_t i = 0; i < n_; ++i) {
    for (int k = 0; k < dim_; ++k) fresh[k] += spins_[static_cast<std::size_t>(i * dim_ + k)];
  }
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    if (!(std::abs(fresh[k] - total[k]) <= 1e-9 * static_cast<double>(n_))) {
      throw std::invalid_argument("restore_cached_total: total does not match the spins");
    }
  }
  total_.assign(total.begin(), total.end());
  since_recompute_ = since_recompute;
}

double SpinConfiguration::max_norm_error() const {
  double worst = 0.0;
  for (std::int64_t i = 0; i < n_; ++i) {
    const double* s = spins_.data() + i * dim_;
    double sq = 0.0;
    for (int k = 0; k < dim_; ++k) sq += s[k] * s[k];
    worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
  }
  return worst;
}

double hamiltonian(const SpinConfiguration& config) {
  return -config.total_spin_squared() / (2.0 * static_cast<double>(config.size()));
}

SpinConfiguration aligned_configuration(int dim, std::int64_t n_sites,
                                        std::span<const double> direction) {
  if (direction.empty()) return SpinConfiguration(dim, n_sites);
  if (direction.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("aligned_configuration: wrong direction dimension");
  }
  double norm = 0.0;
  for (double x : direction) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw std::invalid_argument("aligned_configuration: zero direction");
  std::vector<double> flat(static_cast<std::size_t>(dim * n_sites));
  for (std::int64_t i = 0; i < n_sites; ++i) {
    for (int k = 0; k < dim; ++k) flat[static_cast<std::size_t>(i * dim + k)] = direction[k] / norm;
  }
  return SpinConfiguration(dim, std::move(flat));
}

void write_configuration_csv(std::ostream& out, const SpinConfiguration& config) {
  out << "site";
  for (int k = 1; k <= config.dim(); ++k) out << ",x" << k;
  out << '\n';
  char buf[32];
  for (std::int64_t i = 0; i < config.size(); ++i) {
    out << i;
    for (double x : config.spin(i)) {
      auto res = std::to_chars(buf, buf + sizeof buf, x);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

SpinConfiguration read_configuration_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("site", 0) != 0) {
    throw std::runtime_error("configuration csv: missing header");
  }
  int dim = 0;
  for (char c : line) dim += (c == ',');
  if (dim < 1) throw std::runtime_error("configuration csv: no coordinate columns");
  std::vector<double> flat;
  std::int64_t expected_site = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (std::stoll(cell) != expected_site++) {
      throw std::runtime_error("configuration csv: sites must be 0..n-1 in order");
    }
    int count = 0;
    while (std::getline(row, cell, ',')) {
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc()) throw std::runtime_error("configuration csv: bad number '" + cell + "'");
      flat.push_back(v);
      ++count;
    }
    if (count != dim) throw std::runtime_error("configuration csv: wrong column count");
  }
  return SpinConfiguration(dim, std::move(flat));
}

}  // namespace onmf
