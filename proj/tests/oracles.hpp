#pragma once

// Brute-force reference computations for the test suites. Nothing here uses
// the library's incremental bookkeeping.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "eaxedo/crossover.hpp"
#include "eaxedo/instance.hpp"
#include "eaxedo/tour.hpp"

namespace oracle {

using eaxedo::Edge;
using eaxedo::NodeId;
using eaxedo::Tour;
using eaxedo::TspInstance;
using eaxedo::Weight;
using DirectedSet = std::set<std::pair<NodeId, NodeId>>;

inline TspInstance random_instance(std::size_t n, eaxedo::Rng& rng, double extent = 100.0) {
    std::uniform_real_distribution<double> u(0.0, extent);
    std::vector<eaxedo::Point> pts(n);
    for (auto& p : pts) p = {std::round(u(rng)), std::round(u(rng))};
    return TspInstance("rand" + std::to_string(n), pts, eaxedo::EdgeWeightKind::Euc2d);
}

inline TspInstance unit_square() {
    return TspInstance("square", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, eaxedo::EdgeWeightKind::Euc2d);
}

inline Tour tour_of(std::vector<NodeId> order, const TspInstance& inst) { return Tour(std::move(order), inst); }

inline DirectedSet directed_edges(std::span<const NodeId> order) {
    DirectedSet s;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeId a = order[i];
        const NodeId b = order[(i + 1) % order.size()];
        s.insert({a, b});
        s.insert({b, a});
    }
    return s;
}

inline Weight cost(const TspInstance& inst, std::span<const NodeId> order) {
    Weight c = 0;
    for (std::size_t i = 0; i < order.size(); ++i) c += inst.distance(order[i], order[(i + 1) % order.size()]);
    return c;
}

/// H over directed edges with normaliser T.
inline double entropy(const std::vector<std::vector<NodeId>>& tours, double T) {
    std::map<std::pair<NodeId, NodeId>, int> f;
    for (const auto& t : tours) {
        for (const auto& e : directed_edges(t)) ++f[e];
    }
    double h = 0.0;
    for (const auto& [e, c] : f) {
        const double p = c / T;
        h -= p * std::log(p);
    }
    return h;
}

inline std::vector<std::vector<NodeId>> orders(std::span<const Tour> tours) {
    std::vector<std::vector<NodeId>> out;
    for (const Tour& t : tours) out.emplace_back(t.order().begin(), t.order().end());
    return out;
}

inline std::size_t difference(const std::vector<NodeId>& p, const std::vector<NodeId>& q) {
    const DirectedSet a = directed_edges(p);
    const DirectedSet b = directed_edges(q);
    std::size_t d = 0;
    for (const auto& e : a) d += b.count(e) ? 0 : 1;
    return d;
}

inline std::int64_t edge_diversity(const std::vector<std::vector<NodeId>>& tours) {
    std::int64_t s = 0;
    for (const auto& p : tours) {
        for (const auto& q : tours) s += static_cast<std::int64_t>(difference(p, q));
    }
    return s;
}

inline double pairwise_diversity(const std::vector<std::vector<NodeId>>& tours, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < tours.size(); ++i) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t j = 0; j < tours.size(); ++j) {
            if (i != j) best = std::min(best, difference(tours[i], tours[j]));
        }
        s += static_cast<double>(best);
    }
    return s / (static_cast<double>(n) * static_cast<double>(tours.size()));
}

/// Order of the single cycle described by undirected adjacency, or empty if
/// the edges do not form one Hamiltonian cycle.
inline std::vector<NodeId> cycle_order(const std::vector<std::vector<NodeId>>& adj) {
    const std::size_t n = adj.size();
    for (const auto& a : adj) {
        if (a.size() != 2) return {};
    }
    std::vector<NodeId> order{0};
    NodeId prev = -1;
    NodeId cur = 0;
    while (true) {
        const NodeId nxt = adj[static_cast<std::size_t>(cur)][0] != prev ? adj[static_cast<std::size_t>(cur)][0]
                                                                          : adj[static_cast<std::size_t>(cur)][1];
        prev = cur;
        cur = nxt;
        if (cur == 0) break;
        order.push_back(cur);
        if (order.size() > n) return {};
    }
    return order.size() == n ? order : std::vector<NodeId>{};
}

struct Candidate {
    Edge e1, e2, e3, e4;
    Weight cost = 0;
    double score = 0.0;
    std::vector<NodeId> order;
};

/// Every reconnection of a two-sub-tour intermediate solution, scored by the
/// entropy of the population plus the resulting tour (normaliser T).
inline std::vector<Candidate> all_reconnections(const eaxedo::IntermediateSolution& t, const TspInstance& inst,
                                                const std::vector<std::vector<NodeId>>& pop, double T) {
    const auto ids = t.subtour_ids();
    const auto r1 = t.subtour_edges(ids[0]);
    const auto r2 = t.subtour_edges(ids[1]);
    std::vector<std::vector<NodeId>> base(t.size());
    for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
        for (const NodeId w : t.links(v)) base[static_cast<std::size_t>(v)].push_back(w);
    }
    auto drop = [](std::vector<NodeId>& l, NodeId w) { l.erase(std::find(l.begin(), l.end(), w)); };
    std::vector<Candidate> out;
    for (const Edge& x : r1) {
        for (const Edge& y : r2) {
            for (const auto& [c, d] : {std::pair{y.a, y.b}, std::pair{y.b, y.a}}) {
                auto adj = base;
                drop(adj[static_cast<std::size_t>(x.a)], x.b);
                drop(adj[static_cast<std::size_t>(x.b)], x.a);
                drop(adj[static_cast<std::size_t>(c)], d);
                drop(adj[static_cast<std::size_t>(d)], c);
                adj[static_cast<std::size_t>(x.a)].push_back(c);
                adj[static_cast<std::size_t>(c)].push_back(x.a);
                adj[static_cast<std::size_t>(x.b)].push_back(d);
                adj[static_cast<std::size_t>(d)].push_back(x.b);
                Candidate cand;
                cand.e1 = x;
                cand.e2 = y;
                cand.e3 = Edge(x.a, c);
                cand.e4 = Edge(x.b, d);
                cand.order = cycle_order(adj);
                if (cand.order.empty()) continue;
                cand.cost = cost(inst, cand.order);
                auto with = pop;
                with.push_back(cand.order);
                cand.score = entropy(with, T);
                out.push_back(std::move(cand));
            }
        }
    }
    return out;
}

/// Highest score (tolerance 1e-9), then lower cost, then smaller edges.
inline const Candidate* best_feasible(const std::vector<Candidate>& cands, Weight c_max) {
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
        if (c.cost > c_max) continue;
        if (best == nullptr) {
            best = &c;
            continue;
        }
        if (c.score > best->score + 1e-9) {
            best = &c;
        } else if (std::abs(c.score - best->score) <= 1e-9) {
            const auto kc = std::tie(c.e1, c.e2, c.e3, c.e4);
            const auto kb = std::tie(best->e1, best->e2, best->e3, best->e4);
            if (c.cost < best->cost || (c.cost == best->cost && kc < kb)) best = &c;
        }
    }
    return best;
}

/// Exact optimum by Held-Karp dynamic programming (n <= 16).
inline Weight held_karp(const TspInstance& inst) {
    const std::size_t n = inst.size();
    const std::size_t full = std::size_t{1} << (n - 1);
    constexpr Weight kInf = std::numeric_limits<Weight>::max() / 4;
    // dp[S][j]: shortest path from node n-1 through set S (over nodes 0..n-2) ending at j.
    std::vector<Weight> dp(full * (n - 1), kInf);
    const auto last = static_cast<NodeId>(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) dp[(std::size_t{1} << j) * (n - 1) + j] = inst.distance(last, static_cast<NodeId>(j));
    for (std::size_t S = 1; S < full; ++S) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const Weight cur = dp[S * (n - 1) + j];
            if (!(S >> j & 1) || cur >= kInf) continue;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                if (S >> k & 1) continue;
                const std::size_t T = S | (std::size_t{1} << k);
                Weight& slot = dp[T * (n - 1) + k];
                slot = std::min(slot, cur + inst.distance(static_cast<NodeId>(j), static_cast<NodeId>(k)));
            }
        }
    }
    Weight best = kInf;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        best = std::min(best, dp[(full - 1) * (n - 1) + j] + inst.distance(static_cast<NodeId>(j), last));
    }
    return best;
}

}  // namespace oracle
