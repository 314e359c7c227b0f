#include "eaxedo/instance.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace eaxedo {

const char* to_string(EdgeWeightKind kind) {
    switch (kind) {
        case EdgeWeightKind::Euc2d: return "EUC_2D";
        case EdgeWeightKind::Ceil2d: return "CEIL_2D";
        case EdgeWeightKind::Att: return "ATT";
    }
    return "?";
}

ParseError::ParseError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      kind_(kind),
      line_(line) {}

Weight tsplib_distance(EdgeWeightKind kind, const Point& p, const Point& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    switch (kind) {
        case EdgeWeightKind::Euc2d:
            return static_cast<Weight>(std::sqrt(dx * dx + dy * dy) + 0.5);
        case EdgeWeightKind::Ceil2d:
            return static_cast<Weight>(std::ceil(std::sqrt(dx * dx + dy * dy)));
        case EdgeWeightKind::Att: {
            const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
            const auto t = static_cast<Weight>(r + 0.5);
            return static_cast<double>(t) < r ? t + 1 : t;
        }
    }
    return 0;
}

TspInstance::TspInstance(std::string name, std::vector<Point> coords, EdgeWeightKind kind,
                         std::vector<std::int64_t> ids, std::size_t matrix_threshold)
    : name_(std::move(name)), coords_(std::move(coords)), kind_(kind), ids_(std::move(ids)) {
    if (coords_.size() < 3) {
        throw std::invalid_argument("instance needs at least 3 nodes");
    }
    if (ids_.empty()) {
        ids_.resize(coords_.size());
        std::iota(ids_.begin(), ids_.end(), std::int64_t{1});
    }
    if (ids_.size() != coords_.size()) {
        throw std::invalid_argument("id list does not match coordinate count");
    }
    const std::size_t n = coords_.size();
    if (n <= matrix_threshold) {
        matrix_.assign(n * n, 0);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                const Weight w = compute(static_cast<NodeId>(u), static_cast<NodeId>(v));
                assert(w <= std::numeric_limits<std::int32_t>::max());
                matrix_[u * n + v] = static_cast<std::int32_t>(w);
                matrix_[v * n + u] = static_cast<std::int32_t>(w);
            }
        }
    }
}

NodeId TspInstance::index_of(std::int64_t id) const {
    // Ids are 1..n in file order for every TSPLIB file we have seen.
    if (id >= 1 && static_cast<std::size_t>(id) <= ids_.size() &&
        ids_[static_cast<std::size_t>(id - 1)] == id) {
        return static_cast<NodeId>(id - 1);
    }
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    return it == ids_.end() ? NodeId{-1} : static_cast<NodeId>(it - ids_.begin());
}

Weight TspInstance::compute(NodeId u, NodeId v) const {
    return tsplib_distance(kind_, coords_[static_cast<std::size_t>(u)],
                           coords_[static_cast<std::size_t>(v)]);
}

Weight TspInstance::distance(NodeId u, NodeId v) const {
    assert(u != v);
    if (!matrix_.empty()) {
        return matrix_[static_cast<std::size_t>(u) * coords_.size() + static_cast<std::size_t>(v)];
    }
    return compute(u, v);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits "KEY : VALUE" (colon optional). Key is upper-cased.
std::pair<std::string, std::string> split_keyword(const std::string& line) {
    std::string key;
    std::string value;
    const auto colon = line.find(':');
    if (colon != std::string::npos) {
        key = trim(line.substr(0, colon));
        value = trim(line.substr(colon + 1));
    } else {
        std::istringstream ss(line);
        ss >> key;
        std::getline(ss, value);
        value = trim(value);
    }
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return {key, value};
}

}  // namespace

TspInstance parse_tsplib(std::istream& in) {
    using Kind = ParseError::Kind;
    std::string name;
    std::optional<std::size_t> dimension;
    std::optional<EdgeWeightKind> kind;
    std::vector<Point> coords;
    std::vector<std::int64_t> ids;
    bool in_coords = false;
    bool saw_coords = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (in_coords) {
            if (line == "EOF" || line == "-1") {
                in_coords = false;
                continue;
            }
            std::istringstream ss(line);
            std::int64_t id = 0;
            Point p;
            if (!(ss >> id >> p.x >> p.y)) {
                if (std::isalpha(static_cast<unsigned char>(line[0]))) {
                    // next section keyword
                    in_coords = false;
                } else {
                    throw ParseError(Kind::MalformedHeader, line_no,
                                     "malformed coordinate line '" + line + "'");
                }
            } else {
                if (dimension && coords.size() == *dimension) {
                    throw ParseError(Kind::CoordinateCount, line_no,
                                     "more coordinate lines than DIMENSION " +
                                         std::to_string(*dimension));
                }
                coords.push_back(p);
                ids.push_back(id);
                continue;
            }
        }
        const auto [key, value] = split_keyword(line);
        if (key == "NAME") {
            name = value;
        } else if (key == "DIMENSION") {
            try {
                std::size_t pos = 0;
                const long long d = std::stoll(value, &pos);
                if (pos != value.size() || d < 3) throw std::invalid_argument(value);
                dimension = static_cast<std::size_t>(d);
            } catch (const std::exception&) {
                throw ParseError(Kind::MalformedHeader, line_no, "bad DIMENSION '" + value + "'");
            }
        } else if (key == "EDGE_WEIGHT_TYPE") {
            if (value == "EUC_2D") {
                kind = EdgeWeightKind::Euc2d;
            } else if (value == "CEIL_2D") {
                kind = EdgeWeightKind::Ceil2d;
            } else if (value == "ATT") {
                kind = EdgeWeightKind::Att;
            } else {
                throw ParseError(Kind::UnsupportedWeightType, line_no,
                                 "unsupported EDGE_WEIGHT_TYPE '" + value + "'");
            }
        } else if (key == "TYPE") {
            if (value != "TSP") {
                throw ParseError(Kind::MalformedHeader, line_no,
                                 "unsupported TYPE '" + value + "'");
            }
        } else if (key == "NODE_COORD_SECTION") {
            if (!dimension) {
                throw ParseError(Kind::MalformedHeader, line_no,
                                 "NODE_COORD_SECTION before DIMENSION");
            }
            in_coords = true;
            saw_coords = true;
        } else if (key == "EOF") {
            break;
        } else if (key == "COMMENT" || key == "NODE_COORD_TYPE" || key == "DISPLAY_DATA_TYPE") {
            // informational
        } else {
            throw ParseError(Kind::MalformedHeader, line_no, "unexpected line '" + line + "'");
        }
    }

    if (name.empty()) throw ParseError(Kind::MalformedHeader, line_no, "missing NAME");
    if (!dimension) throw ParseError(Kind::MalformedHeader, line_no, "missing DIMENSION");
    if (!kind) throw ParseError(Kind::MalformedHeader, line_no, "missing EDGE_WEIGHT_TYPE");
    if (!saw_coords) throw ParseError(Kind::MalformedHeader, line_no, "missing NODE_COORD_SECTION");
    if (coords.size() != *dimension) {
        throw ParseError(Kind::CoordinateCount, line_no,
                         "DIMENSION " + std::to_string(*dimension) + " but " +
                             std::to_string(coords.size()) + " coordinate lines");
    }
    return TspInstance(name, std::move(coords), *kind, std::move(ids));
}

TspInstance load_tsplib(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_tsplib(in);
}

void write_tsplib(std::ostream& out, const TspInstance& inst) {
    out << "NAME : " << inst.name() << '\n'
        << "TYPE : TSP\n"
        << "DIMENSION : " << inst.size() << '\n'
        << "EDGE_WEIGHT_TYPE : " << to_string(inst.kind()) << '\n'
        << "NODE_COORD_SECTION\n";
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const Point& p = inst.coords()[i];
        out << inst.ids()[i] << ' ' << p.x << ' ' << p.y << '\n';
    }
    out.precision(old);
    out << "EOF\n";
}

NearestNeighborLists::NearestNeighborLists(std::size_t k, std::vector<NodeId> flat)
    : k_(k), flat_(std::move(flat)) {}

namespace {

void check_k(const TspInstance& inst, std::size_t k) {
    if (k < 1 || k > inst.size() - 1) {
        throw std::invalid_argument("neighbour list length " + std::to_string(k) +
                                    " outside [1, " + std::to_string(inst.size() - 1) + "]");
    }
}

// Partial selection of the k best (distance, index) pairs for one node.
void nearest_row(const TspInstance& inst, NodeId v, std::size_t k,
                 std::vector<std::pair<Weight, NodeId>>& scratch, NodeId* row) {
    const auto n = static_cast<NodeId>(inst.size());
    scratch.clear();
    for (NodeId u = 0; u < n; ++u) {
        if (u != v) scratch.emplace_back(inst.distance(v, u), u);
    }
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                      scratch.end());
    for (std::size_t i = 0; i < k; ++i) row[i] = scratch[i].second;
}

}  // namespace

NearestNeighborLists build_nn_lists(const TspInstance& inst, std::size_t k) {
    check_k(inst, k);
    const auto n = static_cast<std::int64_t>(inst.size());
    std::vector<NodeId> flat(inst.size() * k);
#pragma omp parallel if (n > 512)
    {
        std::vector<std::pair<Weight, NodeId>> scratch;
        scratch.reserve(inst.size());
#pragma omp for schedule(static)
        for (std::int64_t v = 0; v < n; ++v) {
            nearest_row(inst, static_cast<NodeId>(v), k, scratch,
                        flat.data() + static_cast<std::size_t>(v) * k);
        }
    }
    return NearestNeighborLists(k, std::move(flat));
}

namespace reference {

NearestNeighborLists build_nn_lists(const TspInstance& inst, std::size_t k) {
    check_k(inst, k);
    const auto n = static_cast<NodeId>(inst.size());
    std::vector<NodeId> flat;
    flat.reserve(inst.size() * k);
    for (NodeId v = 0; v < n; ++v) {
        std::vector<NodeId> others;
        for (NodeId u = 0; u < n; ++u) {
            if (u != v) others.push_back(u);
        }
        std::stable_sort(others.begin(), others.end(), [&](NodeId a, NodeId b) {
            return inst.distance(v, a) < inst.distance(v, b);
        });
        flat.insert(flat.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return NearestNeighborLists(k, std::move(flat));
}

}  // namespace reference

}  // namespace eaxedo
