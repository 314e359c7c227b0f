#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "eaxedo/diversity.hpp"
#include "eaxedo/instance.hpp"
#include "eaxedo/tour.hpp"
#include "eaxedo/types.hpp"

namespace eaxedo {

/// Raised when the parents share every edge, so no effective AB-cycle exists.
class NoEffectiveCycle : public std::runtime_error {
public:
    NoEffectiveCycle() : std::runtime_error("parents have identical edge sets") {}
};

/// Closed walk alternating between edges of the first parent (A) and the
/// second parent (B). Edge i joins nodes[i] and nodes[(i+1) % size]; even i
/// are A-edges, odd i are B-edges.
struct AbCycle {
    std::vector<NodeId> nodes;

    std::size_t edge_count() const { return nodes.size(); }
    Edge edge(std::size_t i) const { return Edge(nodes[i], nodes[(i + 1) % nodes.size()]); }
    static bool is_a_edge(std::size_t i) { return i % 2 == 0; }
};

/// First violated AB-cycle invariant against the parents, or nullopt.
std::optional<std::string> check_ab_cycle(const AbCycle& cyc, const Tour& p1, const Tour& p2);

/// Degree-2 edge structure made of one or more disjoint sub-tours.
class IntermediateSolution {
public:
    static constexpr NodeId kNone = -1;

    /// Builds p1 with the cycle's A-edges removed and B-edges added.
    /// Throws std::invalid_argument if an A-edge is not in p1.
    IntermediateSolution(const Tour& p1, const AbCycle& cyc, const TspInstance& inst);

    /// Direct construction from disjoint cycles covering every node once.
    /// Throws std::invalid_argument otherwise.
    static IntermediateSolution from_cycles(const std::vector<std::vector<NodeId>>& cycles,
                                            const TspInstance& inst);

    std::size_t size() const { return link_.size(); }
    std::size_t subtour_count() const { return n_sub_; }
    Weight cost() const { return cost_; }
    const std::array<NodeId, 2>& links(NodeId v) const { return link_[static_cast<std::size_t>(v)]; }
    int subtour_of(NodeId v) const { return sub_[static_cast<std::size_t>(v)]; }
    std::size_t subtour_size(int id) const { return sub_size_[static_cast<std::size_t>(id)]; }
    /// Ids of the live sub-tours, ascending.
    std::vector<int> subtour_ids() const;
    /// Undirected edges of one sub-tour in traversal order from its head.
    std::vector<Edge> subtour_edges(int id) const;
    bool has_edge(NodeId u, NodeId v) const {
        const auto& l = links(u);
        return l[0] == v || l[1] == v;
    }
    /// Edges introduced by reconnection steps, in order.
    std::span<const Edge> added_edges() const { return added_; }

    /// Replaces edges (a,b) and (c,d) by (a,c) and (b,d), merging the sub-tours
    /// of a and c. Requires both edges present and in different sub-tours.
    void reconnect(NodeId a, NodeId b, NodeId c, NodeId d, const TspInstance& inst);

    /// Requires a single sub-tour.
    Tour to_tour() const;

    /// Full consistency check: degrees, partition, counts, cost.
    std::optional<std::string> validate(const TspInstance& inst) const;

private:
    IntermediateSolution() = default;
    void replace_link(NodeId v, NodeId from, NodeId to);
    void label_subtours();

    std::vector<std::array<NodeId, 2>> link_;
    std::vector<int> sub_;
    std::vector<std::size_t> sub_size_;
    std::vector<NodeId> sub_head_;
    std::size_t n_sub_ = 0;
    Weight cost_ = 0;
    std::vector<Edge> added_;
};

/// One way of merging two sub-tours: remove (a,b) and (c,d), add (a,c), (b,d).
struct Reconnection {
    NodeId a = -1;
    NodeId b = -1;
    NodeId c = -1;
    NodeId d = -1;
    Weight delta = 0;  // w(a,c) + w(b,d) - w(a,b) - w(c,d)
    double gain = 0.0;  // sum of entropy-contribution changes (search B only)
};

/// Traces an AB-cycle from p1/p2 starting at a random node incident to a
/// differing edge. Throws NoEffectiveCycle when the parents are identical.
AbCycle derive_ab_cycle(const Tour& p1, const Tour& p2, Rng& rng);

inline IntermediateSolution apply_ab_cycle(const Tour& p1, const AbCycle& cyc,
                                           const TspInstance& inst) {
    return IntermediateSolution(p1, cyc, inst);
}

/// Cheapest merge of the smallest sub-tour into another one. Candidate partner
/// edges touch a node in the neighbour lists of e1's endpoints; falls back to
/// an unrestricted scan when that set is empty. Requires >= 2 sub-tours.
Reconnection best_search_a(const IntermediateSolution& t, const NearestNeighborLists& nn,
                           const TspInstance& inst);
/// Applies best_search_a; the sub-tour count drops by one.
void search_a_step(IntermediateSolution& t, const NearestNeighborLists& nn, const TspInstance& inst);

/// Search-B tuning. `neighbors` = 0 scans every edge pair of the two sub-tours;
/// otherwise the partner edge must touch a node in the neighbour lists of e1's
/// endpoints (needs `nn`).
struct SearchBOptions {
    std::size_t neighbors = 0;
    const NearestNeighborLists* nn = nullptr;
};

/// Entropy score of a reconnection against the population table: each removed
/// edge counts as leaving the intermediate solution (f+1 -> f), each added edge
/// as entering it (f -> f+1). The sum equals, up to a constant shared by all
/// candidates, the entropy gain of inserting the resulting tour.
double reconnection_gain(const EdgeFrequencyTable& freq, double total_directed, NodeId a, NodeId b,
                         NodeId c, NodeId d);

/// Among reconnections of the two sub-tours with resulting cost <= c_max, the
/// one with the highest gain; ties to lower cost, then lexicographically
/// smaller (e1, e2, e3, e4). nullopt when none is feasible. Requires exactly
/// two sub-tours. Parallel over e1 for large sub-tours.
std::optional<Reconnection> best_search_b(const IntermediateSolution& t,
                                          const EdgeFrequencyTable& freq, double total_directed,
                                          Weight c_max, const TspInstance& inst,
                                          const SearchBOptions& opts = {});

/// Closes the last two sub-tours with the best search-B reconnection.
std::optional<Tour> search_b(IntermediateSolution t, const EdgeFrequencyTable& freq,
                             double total_directed, Weight c_max, const TspInstance& inst,
                             const SearchBOptions& opts = {});

/// Diagnostics of one crossover call.
struct CrossoverTrace {
    std::size_t cycle_edges = 0;
    std::size_t initial_subtours = 0;
    std::size_t search_a_steps = 0;
    std::size_t search_b_feasible = 0;
};

/// Population context EAX-EDO needs for its final reconnection.
struct EntropyContext {
    const EdgeFrequencyTable* freq = nullptr;
    double total_directed = 1.0;
};

/// EAX with a single AB-cycle and cost-greedy repair.
Tour eax_1ab(const Tour& p1, const Tour& p2, const NearestNeighborLists& nn,
             const TspInstance& inst, Rng& rng, CrossoverTrace* trace = nullptr);

/// EAX-1AB up to two sub-tours, then the entropy-driven final merge under
/// c_max. nullopt when no reconnection meets c_max. If the AB-cycle already
/// yields a single tour, it is returned iff its cost <= c_max.
std::optional<Tour> eax_edo(const Tour& p1, const Tour& p2, const EntropyContext& ctx,
                            Weight c_max, const NearestNeighborLists& nn,
                            const TspInstance& inst, Rng& rng, const SearchBOptions& opts = {},
                            CrossoverTrace* trace = nullptr);

/// Both offspring from one AB-cycle and one shared run of search A.
struct OffspringPair {
    Tour cost_child;                     // EAX-1AB
    std::optional<Tour> diverse_child;   // EAX-EDO
};

OffspringPair eax_pair(const Tour& p1, const Tour& p2, const EntropyContext& ctx, Weight c_max,
                       const NearestNeighborLists& nn, const TspInstance& inst, Rng& rng,
                       const SearchBOptions& opts = {}, CrossoverTrace* trace = nullptr);

namespace reference {
/// Serial search-B scan; oracle for the parallel kernel.
std::optional<Reconnection> best_search_b(const IntermediateSolution& t,
                                          const EdgeFrequencyTable& freq, double total_directed,
                                          Weight c_max, const TspInstance& inst,
                                          const SearchBOptions& opts = {});
}  // namespace reference

}  // namespace eaxedo
