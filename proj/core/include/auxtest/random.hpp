#pragma once

#include <cstdint>
#include <random>

namespace auxtest {

/// Seeded, portable random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Stream `s` of seed `seed` is the engine seeded with
/// splitmix64(seed ^ splitmix64(s + 1)). Uniforms take the top 53 bits of one
/// engine draw; normals use the Marsaglia polar method on those uniforms. No
/// implementation-defined std distribution is involved, so uniforms (and hence
/// discrete samples) are bit-identical across platforms and standard
/// libraries; normals also go through std::log. Changing any of this is a
/// breaking change for recorded reports.
///
/// A generator is single-owner; use child() to obtain independent streams for
/// parallel work.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Independent child stream `index` (deterministic in (seed, stream, index)).
  Rng child(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace auxtest
