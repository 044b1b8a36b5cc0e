#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cbgen {

// xoshiro256** seeded through splitmix64 from (seed, stream_index). Distinct
// stream indices give streams that are independent for practical purposes,
// so replicate i of any experiment can use stream i regardless of threading.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  // Exponential with mean 1.
  double exponential();

  // Child stream keyed by this stream's identity and `index`.
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace cbgen
