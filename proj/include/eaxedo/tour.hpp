#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eaxedo/instance.hpp"
#include "eaxedo/types.hpp"

namespace eaxedo {

/// Hamiltonian cycle stored as an order array plus its inverse, with the tour
/// length cached. Plain value type.
class Tour {
public:
    Tour() = default;

    /// Validates `order` against the instance and computes the cost.
    /// Throws std::invalid_argument on a non-permutation.
    Tour(std::vector<NodeId> order, const TspInstance& inst);

    /// Trusted construction with a known cost (checked in debug builds only).
    static Tour from_order(std::vector<NodeId> order, Weight cost);

    std::size_t size() const { return order_.size(); }
    Weight cost() const { return cost_; }
    std::span<const NodeId> order() const { return order_; }
    std::span<const NodeId> positions() const { return position_; }
    NodeId at(std::size_t i) const { return order_[i]; }
    std::size_t position(NodeId v) const {
        return static_cast<std::size_t>(position_[static_cast<std::size_t>(v)]);
    }

    NodeId next(NodeId v) const {
        const std::size_t p = position(v) + 1;
        return order_[p == order_.size() ? 0 : p];
    }
    NodeId prev(NodeId v) const {
        const std::size_t p = position(v);
        return order_[p == 0 ? order_.size() - 1 : p - 1];
    }
    bool has_edge(NodeId u, NodeId v) const { return next(u) == v || prev(u) == v; }

    /// The n undirected edges, in order-array sequence.
    std::vector<Edge> edges() const;

    /// Reverses the cyclic run of positions [from, to] (inclusive, may wrap)
    /// and adds `delta` to the cached cost.
    void reverse_run(std::size_t from, std::size_t to, Weight delta);

private:
    std::vector<NodeId> order_;
    std::vector<NodeId> position_;
    Weight cost_ = 0;
};

/// True when both tours use the same undirected edge set.
bool same_edges(const Tour& a, const Tour& b);

/// c(p) = w(p(n), p(1)) + sum w(p(i), p(i+1)).
Weight tour_cost(const TspInstance& inst, std::span<const NodeId> order);
inline Weight tour_cost(const TspInstance& inst, const Tour& t) { return tour_cost(inst, t.order()); }

/// First violated invariant of a would-be tour over n nodes, or nullopt.
std::optional<std::string> validate(std::span<const NodeId> order, std::size_t n);
std::optional<std::string> validate(const Tour& t, std::size_t n);

/// Removes edges (order[i], order[i+1]) and (order[j], order[j+1 mod n]) and
/// reconnects them crosswise. Requires i < j and the edges to be non-adjacent.
struct TwoOptMove {
    std::size_t i = 0;
    std::size_t j = 0;
};

bool is_valid_move(const TwoOptMove& m, std::size_t n);
Weight two_opt_delta(const Tour& t, const TspInstance& inst, const TwoOptMove& m);
/// Applies the move by reversing the shorter of the two arcs.
void apply_two_opt(Tour& t, const TspInstance& inst, const TwoOptMove& m);
/// Uniform over non-adjacent edge pairs. Requires n >= 4.
TwoOptMove random_two_opt_move(std::size_t n, Rng& rng);
/// Blind random 2-opt edit of a copy of `t`; no acceptance test.
Tour two_opt_move(const Tour& t, const TspInstance& inst, Rng& rng);

Tour random_tour(const TspInstance& inst, Rng& rng);

/// First-improvement 2-opt until no improving move exists or `max_passes`
/// sweeps were made. Returns true when a local optimum was reached.
bool two_opt_local_search(Tour& t, const TspInstance& inst, std::size_t max_passes);

/// TSPLIB TOUR_SECTION (ids as in the instance file, -1 terminated).
Tour read_tsplib_tour(std::istream& in, const TspInstance& inst);
Tour load_tsplib_tour(const std::string& path, const TspInstance& inst);
void write_tsplib_tour(std::ostream& out, const Tour& t, const TspInstance& inst,
                       const std::string& name);

}  // namespace eaxedo
