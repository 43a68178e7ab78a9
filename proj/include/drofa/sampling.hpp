#ifndef DROFA_SAMPLING_HPP
#define DROFA_SAMPLING_HPP

#include <cstddef>
#include <vector>

#include "drofa/domain.hpp"
#include "drofa/objectives.hpp"
#include "drofa/rng.hpp"

namespace drofa {

// m i.i.d. categorical draws from lambda, with replacement. Duplicates
// are kept; aggregation always divides by m.
std::vector<std::size_t> sample_clients_weighted(const MixtureWeights& lambda,
                                                 std::size_t m,
                                                 RngStream& rng);

std::vector<std::size_t> sample_clients_uniform(std::size_t n_clients,
                                                std::size_t m, RngStream& rng);

// local-step offset k' uniform in {1, ..., tau}
std::size_t sample_snapshot_step(std::size_t tau, RngStream& rng);

// b uniform-with-replacement row indices into the shard
std::vector<std::size_t> draw_minibatch(const ClientShard& shard,
                                        std::size_t b, RngStream& rng);

}  // namespace drofa

#endif
