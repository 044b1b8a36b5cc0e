#include "cbgen/random.hpp"

#include <cmath>

namespace cbgen {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {
  std::uint64_t a = seed;
  std::uint64_t key = splitmix64(a);
  std::uint64_t b = stream_index ^ 0x6A09E667F3BCC909ULL;
  key ^= splitmix64(b) * 0xD1B54A32D192ED03ULL;
  for (auto& word : s_) word = splitmix64(key);
}

RandomStream::result_type RandomStream::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform()); }

RandomStream RandomStream::substream(std::uint64_t index) const {
  std::uint64_t h = stream_index_ ^ 0x243F6A8885A308D3ULL;
  std::uint64_t mixed = splitmix64(h);
  std::uint64_t g = index;
  mixed ^= splitmix64(g) + 0x13198A2E03707344ULL;
  return RandomStream(seed_, mixed);
}

}  // namespace cbgen
