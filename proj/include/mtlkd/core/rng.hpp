#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mtlkd {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// The 128-bit counter is split into a 64-bit block index and a 64-bit stream
// id, so `substream(k)` yields statistically independent sequences that are
// reproducible on every platform. All distribution helpers below are
// implemented here rather than through <random> distributions, whose output
// is implementation-defined.
class Rng {
 public:
  struct Cursor {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t block = 0;
    std::uint32_t lane = 4;  // 4 = buffer empty
    friend bool operator==(const Cursor&, const Cursor&) = default;
  };

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  explicit Rng(const Cursor& cursor);

  // Raw Philox block for (counter, key). Exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  // Index drawn proportionally to `weights` (non-negative, positive sum).
  std::size_t categorical(std::span<const double> weights);

  // Independent generator for sub-stream `k` of this generator's stream.
  Rng substream(std::uint64_t k) const;

  Cursor cursor() const { return cur_; }

 private:
  void refill();

  Cursor cur_;
  std::array<std::uint32_t, 4> buf_{};
};

}  // namespace mtlkd
