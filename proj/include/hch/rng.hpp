#pragma once

#include <array>
#include <cstdint>

namespace hch {

/// Identifies an independent random sequence. Same (seed, stream) always
/// reproduces the same draws; split() derives child streams deterministically.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngStream split(std::uint64_t child) const;
};

/// Philox4x32-10 block. Exposed for the known-answer test.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator over one RngStream. Draw k of the stream is a pure
/// function of (seed, stream, k).
class Philox {
 public:
  explicit Philox(RngStream s);

  std::uint64_t next_u64();
  /// Uniform in (0, 1).
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hch
