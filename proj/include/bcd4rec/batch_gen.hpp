#pragma once

#include <cstdint>
#include <vector>

#include "bcd4rec/policies.hpp"
#include "bcd4rec/session.hpp"
#include "bcd4rec/sim_env.hpp"

namespace bcd4rec::data {

/// Logs `sessions` simulator episodes played by `policy`. Users and policy
/// randomness come from streams of `seed` reserved for batch generation.
std::vector<SessionLog> generate_batch(const sim::EnvConfig& env_config, const policies::Policy& policy,
                                       int sessions, std::uint64_t seed, int history_len = 10);

}  // namespace bcd4rec::data
