#include "onmf/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace onmf {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream) {
  return splitmix64(master_seed ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
}

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_ << ' ' << normal_;
  return out.str();
}

void Rng::restore(const std::string& text) {
  std::istringstream in(text);
  in >> engine_ >> normal_;
  if (!in) throw std::invalid_argument("Rng::restore: malformed state");
}

}  // namespace onmf
