#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eaxedo/tour.hpp"
#include "eaxedo/types.hpp"

namespace eaxedo {

/// Number of population members using each undirected edge. Zero counts are
/// never stored. Entries are kept per smaller endpoint; a node touches at most
/// 2*mu distinct population edges, so lookups scan a short row.
class EdgeFrequencyTable {
public:
    explicit EdgeFrequencyTable(std::size_t n = 0) : rows_(n) {}

    std::size_t node_count() const { return rows_.size(); }
    int count(NodeId u, NodeId v) const;
    int count(const Edge& e) const { return count(e.a, e.b); }

    /// f(e) += delta. Throws std::logic_error if the count would go negative.
    void add(NodeId u, NodeId v, int delta);
    void add_tour(const Tour& t, int delta);

    std::size_t unique_edges() const { return unique_; }
    /// Sum of f(e) over undirected edges (n*mu for a full population).
    std::int64_t total() const { return total_; }
    int max_count() const;

    /// (edge, f) for every stored edge, sorted by edge.
    std::vector<std::pair<Edge, int>> entries() const;

private:
    std::vector<std::vector<std::pair<NodeId, int>>> rows_;
    std::size_t unique_ = 0;
    std::int64_t total_ = 0;
};

/// Contribution of one directed edge used f times when the population holds
/// `total_directed` directed edges: -(f/T) ln(f/T); zero for f = 0.
double directed_contribution(int f, double total_directed);

/// Change of an undirected edge's entropy contribution (both directions) when
/// its count moves from f to f + change, normaliser held fixed.
double delta_h(int f, int change, double total_directed);
/// Same, looking f up in the table. Throws std::logic_error when decrementing
/// an absent edge.
double delta_h(const EdgeFrequencyTable& freq, const Edge& e, int change, double total_directed);

/// From-scratch H over a frequency table with normaliser T.
double entropy_of(const EdgeFrequencyTable& freq, double total_directed);

/// H_min = ln(2n).
inline double min_entropy(std::size_t n) { return std::log(2.0 * static_cast<double>(n)); }

/// A multiset of tours with incremental edge bookkeeping.
///
/// The entropy normaliser 2*n*mu uses the steady-state size `mu` fixed at
/// construction, so the cached value stays meaningful during the transient
/// mu+1 state of insert-then-remove steps. The state behind H is integral
/// (a histogram of edge counts), so the cached entropy never drifts.
class Population {
public:
    Population(std::size_t n, std::size_t mu);
    /// mu = tours.size().
    explicit Population(std::vector<Tour> tours);

    std::size_t n() const { return n_; }
    std::size_t mu() const { return mu_; }
    std::size_t size() const { return tours_.size(); }
    const Tour& operator[](std::size_t i) const { return tours_[i]; }
    std::span<const Tour> tours() const { return tours_; }
    const EdgeFrequencyTable& freq() const { return freq_; }
    double total_directed() const { return 2.0 * static_cast<double>(n_ * mu_); }

    double entropy() const;

    std::size_t insert(Tour t);
    Tour remove(std::size_t index);
    void replace(std::size_t index, Tour t);

    /// Lowest cost, ties to the lower index.
    std::size_t best_index() const;
    Weight max_cost() const;
    Weight cost(std::size_t i) const { return tours_[i].cost(); }

    /// The ceil(pct*size/100) lowest-cost members, ties by index; sorted.
    std::vector<std::size_t> elite(double pct) const;

    /// H(P \ {i}) - H(P) under the fixed normaliser.
    double removal_delta(std::size_t i) const;
    /// removal_delta for every member. Parallel over members for large n*mu.
    std::vector<double> removal_deltas() const;

    /// Keeps an all-pairs matrix of directed edge-set differences up to date
    /// across insert/remove/replace. Needed for cheap PD-driven selection.
    void track_pairwise(bool on);
    bool tracks_pairwise() const { return track_pairwise_; }
    /// |E(p_i) \ E(p_j)| over directed edges; requires tracking.
    int pairwise(std::size_t i, std::size_t j) const { return pairwise_[i][j]; }

private:
    void account(const Tour& t, int delta);
    std::vector<int> differences_to(const Tour& t) const;

    std::size_t n_;
    std::size_t mu_;
    std::vector<Tour> tours_;
    EdgeFrequencyTable freq_;
    std::vector<std::int64_t> histogram_;  // undirected edges per count value
    bool track_pairwise_ = false;
    std::vector<std::vector<int>> pairwise_;
};

/// ED(P) = sum_p sum_q |E(p) \ E(q)| over directed edge sets.
std::int64_t edge_diversity(const Population& pop);
/// PD(P) = (1/(n mu)) sum_p min_{q != p} |E(p) \ E(q)|, mu = current size.
/// Throws std::invalid_argument for fewer than two members.
double pairwise_diversity(const Population& pop);

/// Directed edge-set differences between all pairs, row-major size x size.
/// OpenMP over rows for large inputs.
std::vector<int> pairwise_differences(std::span<const Tour> tours);

/// Index of the unprotected member whose removal leaves the highest entropy;
/// ties to the lowest index. Does not remove it.
/// Throws std::invalid_argument when every member is protected.
std::size_t worst_for_entropy(const Population& pop, std::span<const std::size_t> protected_idx);
/// Same selection by ED(P \ {q}) and PD(P \ {q}).
std::size_t worst_for_edge_diversity(const Population& pop,
                                     std::span<const std::size_t> protected_idx);
std::size_t worst_for_pairwise_diversity(const Population& pop,
                                         std::span<const std::size_t> protected_idx);

/// Selects via worst_for_entropy and removes; returns the removed index.
std::size_t remove_worst_for_entropy(Population& pop, std::span<const std::size_t> protected_idx);

namespace reference {
std::vector<int> pairwise_differences(std::span<const Tour> tours);
std::vector<double> removal_deltas(const Population& pop);
}  // namespace reference

}  // namespace eaxedo
