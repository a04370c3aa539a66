#pragma once

// Counter-based seeding: the generator for one (seed, stream, step) triple is
// built from scratch, so any step of any path can be regenerated alone.

#include <cstdint>
#include <random>

namespace fracheat::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t stream_id,
                                 std::uint64_t step_index) {
  std::uint64_t h = splitmix64(seed_base);
  h = splitmix64(h ^ stream_id);
  h = splitmix64(h ^ (step_index * 0xd1b54a32d192ed03ULL));
  return h;
}

/// Standard normal draws for one coordinate triple.
class NormalStream {
public:
  NormalStream(std::uint64_t seed_base, std::uint64_t stream_id, std::uint64_t step_index)
      : engine_(derive_seed(seed_base, stream_id, step_index)) {}
  double operator()() { return dist_(engine_); }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace fracheat::rng
