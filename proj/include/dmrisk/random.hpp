#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace dmrisk {

using Rng = std::mt19937_64;

/// Seeds for independent substreams are derived from (master, stream, chunk)
/// with a splitmix64 finalizer, so a draw never depends on how work is split
/// across threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t chunk = 0);

Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t chunk = 0);

// Draws are generated in fixed-size chunks; each chunk owns one substream.
inline constexpr std::size_t kChunkSize = 1u << 15;

void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(chunk_index, begin, end) over [0, n) in chunks of kChunkSize.
/// Chunks may execute concurrently; results must be written to disjoint ranges.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Runs fn(i) for i in [0, count) on the worker pool.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace dmrisk
