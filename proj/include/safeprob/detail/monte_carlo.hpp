#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace safeprob::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t shard) {
    return splitmix64(splitmix64(seed) ^ splitmix64(shard + 1));
}

// Fixed so that results do not depend on the machine's core count.
inline constexpr std::uint64_t kShards = 64;

// Runs body(rng, first_index, count, acc) on kShards independent streams and
// returns the per-shard accumulators in shard order. Draw indices are global,
// so `first_index + j` identifies a draw across shards.
template <class Acc, class Body>
std::vector<Acc> run_shards(std::uint64_t samples, std::uint64_t seed, Body body) {
    std::vector<Acc> acc(kShards);
    const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), kShards));
    auto work = [&](unsigned worker) {
        for (std::uint64_t s = worker; s < kShards; s += workers) {
            const std::uint64_t first = samples * s / kShards;
            const std::uint64_t last = samples * (s + 1) / kShards;
            std::mt19937_64 rng(derive_seed(seed, s));
            body(rng, first, last - first, acc[s]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(work, w);
    }
    work(0);
    for (auto& t : pool) {
        t.join();
    }
    return acc;
}

}  // namespace safeprob::detail
