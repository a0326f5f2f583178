#pragma once

#include <cstdint>
#include <random>

namespace fedhgn {

// Independent 64-bit seed for a named stream (partition, masks, init,
// dropout...) and an index within it, derived from one experiment seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint32_t stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), stream,
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace seed_stream {
inline constexpr std::uint32_t kPartition = 1;
inline constexpr std::uint32_t kMasks = 2;
inline constexpr std::uint32_t kInit = 3;
inline constexpr std::uint32_t kDropout = 4;
}  // namespace seed_stream

}  // namespace fedhgn
