#include "drofa/sampling.hpp"

#include "drofa/errors.hpp"

namespace drofa {

std::vector<std::size_t> sample_clients_weighted(const MixtureWeights& lambda,
                                                 std::size_t m,
                                                 RngStream& rng) {
  if (m < 1) throw BadConfig("sample count m must be >= 1");
  std::vector<std::size_t> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    double u = rng.next_double();
    double cum = 0.0;
    std::size_t pick = lambda.size() - 1;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      cum += lambda[i];
      if (u < cum) {
        pick = i;
        break;
      }
    }
    out[k] = pick;
  }
  return out;
}

std::vector<std::size_t> sample_clients_uniform(std::size_t n_clients,
                                                std::size_t m, RngStream& rng) {
  if (m < 1) throw BadConfig("sample count m must be >= 1");
  if (n_clients < 1) throw BadConfig("need at least one client");
  std::vector<std::size_t> out(m);
  for (std::size_t k = 0; k < m; ++k)
    out[k] = static_cast<std::size_t>(rng.next_below(n_clients));
  return out;
}

std::size_t sample_snapshot_step(std::size_t tau, RngStream& rng) {
  if (tau < 1) throw BadConfig("tau must be >= 1");
  return 1 + static_cast<std::size_t>(rng.next_below(tau));
}

std::vector<std::size_t> draw_minibatch(const ClientShard& shard,
                                        std::size_t b, RngStream& rng) {
  if (b < 1) throw BadConfig("batch size must be >= 1");
  if (shard.size() == 0) throw BadConfig("empty shard");
  std::vector<std::size_t> out(b);
  for (std::size_t k = 0; k < b; ++k)
    out[k] = static_cast<std::size_t>(rng.next_below(shard.size()));
  return out;
}

}  // namespace drofa
