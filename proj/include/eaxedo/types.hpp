#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace eaxedo {

using NodeId = std::int32_t;
using Weight = std::int64_t;

/// Every stochastic choice of a run draws from one of these, so a seed fully
/// determines the run.
using Rng = std::mt19937_64;

/// Undirected edge, always stored with first < second.
struct Edge {
    NodeId a = 0;
    NodeId b = 0;

    Edge() = default;
    Edge(NodeId u, NodeId v) : a(u < v ? u : v), b(u < v ? v : u) {}

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::uint64_t edge_key(NodeId u, NodeId v) {
    const auto lo = static_cast<std::uint32_t>(u < v ? u : v);
    const auto hi = static_cast<std::uint32_t>(u < v ? v : u);
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

/// Uniform integer in [0, bound).
template <typename Int>
Int uniform_below(Rng& rng, Int bound) {
    return std::uniform_int_distribution<Int>(0, bound - 1)(rng);
}

/// SplitMix64 finaliser; used to derive independent seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace eaxedo
