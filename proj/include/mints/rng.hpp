#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mints {

/// Counter-based random stream (Philox4x32-10).
///
/// The output is a pure function of (key, counter), so a stream is fully
/// described by its seed and the number of words drawn so far. Substreams
/// obtained from `split` use derived keys and never share counters with the
/// parent, which makes per-replication streams independent of scheduling.
///
/// All samplers are written here instead of using <random> distributions,
/// whose algorithms differ between standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return key_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t position() const { return drawn_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; always consumes exactly two words.
  double normal();
  bool bernoulli(double p);
  /// Index i with probability weights[i] / sum(weights); consumes one word.
  std::size_t categorical(std::span<const double> weights);

  /// Independent substream keyed by `index`. Does not advance this stream.
  RngStream split(std::uint64_t index) const;

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t block_ = 0;  // Philox counter (in 128-bit blocks)
  std::uint64_t drawn_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace mints
