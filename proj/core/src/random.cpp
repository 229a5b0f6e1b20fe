#include "rydkcm/random.hpp"

namespace rydkcm {

Rng make_rng(std::uint64_t seed, std::uint64_t j, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return Rng(seq);
}

Rng make_stream_rng(std::uint64_t seed, std::uint64_t j) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j >> 32)};
  return Rng(seq);
}

}  // namespace rydkcm
