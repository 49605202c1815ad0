#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "mis/random.hpp"

namespace mis {

/// Worker count from MISX_THREADS, else the hardware concurrency (>= 1).
std::size_t default_thread_count();

/// Calls body(r, rng) for r in [0, replicates) with rng seeded by
/// derive_seed(seed, r, tag). Replicates are strided over `threads` workers
/// (0 means default_thread_count()); body must only write state owned by
/// replicate r, which makes results independent of the worker count. The
/// first exception thrown by any replicate is rethrown.
void for_each_replicate(std::size_t replicates, std::uint64_t seed, std::uint64_t tag, std::size_t threads,
                        const std::function<void(std::size_t, RandomStream&)>& body);

}  // namespace mis
