#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eaxedo/types.hpp"

namespace eaxedo {

enum class EdgeWeightKind { Euc2d, Ceil2d, Att };

const char* to_string(EdgeWeightKind kind);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Thrown by the TSPLIB readers. `line` is 1-based; 0 when the problem is only
/// detectable at end of input.
class ParseError : public std::runtime_error {
public:
    enum class Kind {
        MalformedHeader,
        UnsupportedWeightType,
        CoordinateCount,
        MalformedTour,
    };

    ParseError(Kind kind, std::size_t line, const std::string& what);

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// Symmetric TSP instance over 2D coordinates with TSPLIB integer rounding.
/// Immutable after construction; safe to share between concurrent runs.
class TspInstance {
public:
    static constexpr std::size_t kDefaultMatrixThreshold = 3000;

    TspInstance(std::string name, std::vector<Point> coords, EdgeWeightKind kind,
                std::vector<std::int64_t> ids = {},
                std::size_t matrix_threshold = kDefaultMatrixThreshold);

    const std::string& name() const { return name_; }
    std::size_t size() const { return coords_.size(); }
    EdgeWeightKind kind() const { return kind_; }
    std::span<const Point> coords() const { return coords_; }

    /// Original (file) id of an internal node index.
    std::int64_t id_of(NodeId v) const { return ids_[static_cast<std::size_t>(v)]; }
    std::span<const std::int64_t> ids() const { return ids_; }
    /// Internal index for a file id, or -1.
    NodeId index_of(std::int64_t id) const;

    std::optional<Weight> known_opt() const { return known_opt_; }
    void set_known_opt(std::optional<Weight> opt) { known_opt_ = opt; }

    bool has_matrix() const { return !matrix_.empty(); }

    Weight distance(NodeId u, NodeId v) const;

private:
    Weight compute(NodeId u, NodeId v) const;

    std::string name_;
    std::vector<Point> coords_;
    EdgeWeightKind kind_;
    std::vector<std::int64_t> ids_;
    std::vector<std::int32_t> matrix_;
    std::optional<Weight> known_opt_;
};

/// Rounded distance between two points under a TSPLIB metric.
Weight tsplib_distance(EdgeWeightKind kind, const Point& p, const Point& q);

TspInstance parse_tsplib(std::istream& in);
TspInstance load_tsplib(const std::string& path);

/// Writes NAME/TYPE/DIMENSION/EDGE_WEIGHT_TYPE and NODE_COORD_SECTION. Coordinates
/// are printed with round-trip precision.
void write_tsplib(std::ostream& out, const TspInstance& inst);

/// k nearest other nodes per node, ascending by distance, ties by node index.
class NearestNeighborLists {
public:
    NearestNeighborLists() = default;
    NearestNeighborLists(std::size_t k, std::vector<NodeId> flat);

    std::size_t k() const { return k_; }
    std::size_t node_count() const { return k_ == 0 ? 0 : flat_.size() / k_; }
    std::span<const NodeId> of(NodeId v) const {
        return std::span<const NodeId>(flat_).subspan(static_cast<std::size_t>(v) * k_, k_);
    }

private:
    std::size_t k_ = 0;
    std::vector<NodeId> flat_;
};

/// Throws std::invalid_argument unless 1 <= k <= n-1. Rows are built in
/// parallel (OpenMP) for large instances.
NearestNeighborLists build_nn_lists(const TspInstance& inst, std::size_t k);

namespace reference {
/// Serial full-sort construction; kept as the oracle for build_nn_lists.
NearestNeighborLists build_nn_lists(const TspInstance& inst, std::size_t k);
}  // namespace reference

}  // namespace eaxedo
