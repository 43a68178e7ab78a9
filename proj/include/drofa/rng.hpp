#ifndef DROFA_RNG_HPP
#define DROFA_RNG_HPP

#include <cstdint>

namespace drofa {

// Purpose tag for a random stream. Every random choice in a run comes
// from a stream keyed by (seed, purpose, round, client); no stream ever
// depends on execution order, so client work can run in parallel with
// bit-reproducible results.
enum class StreamPurpose : std::uint64_t {
  device_select = 1,
  uniform_select = 2,
  snapshot = 3,
  minibatch = 4,
  probe_batch = 5,
  data_gen = 6,
  eval_data_gen = 7,
};

// Counter-based generator: output i of a stream is a pure function of
// (key, i), where key mixes (seed, purpose, round, client). The mixing
// function is SplitMix64 applied twice.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t round,
            std::uint64_t client = 0);

  std::uint64_t next_u64();
  // uniform in [0, 1)
  double next_double();
  // uniform in {0, ..., n-1}
  std::uint64_t next_below(std::uint64_t n);
  // standard normal (Box-Muller, always consumes two uniforms)
  double next_normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace drofa

#endif
