#include "eaxedo/tour.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace eaxedo {

namespace {

std::vector<NodeId> invert(std::span<const NodeId> order) {
    std::vector<NodeId> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[static_cast<std::size_t>(order[i])] = static_cast<NodeId>(i);
    }
    return pos;
}

}  // namespace

Tour::Tour(std::vector<NodeId> order, const TspInstance& inst) : order_(std::move(order)) {
    if (auto violation = validate(order_, inst.size())) {
        throw std::invalid_argument("invalid tour: " + *violation);
    }
    position_ = invert(order_);
    cost_ = tour_cost(inst, order_);
}

Tour Tour::from_order(std::vector<NodeId> order, Weight cost) {
    Tour t;
    t.order_ = std::move(order);
    assert(!validate(t.order_, t.order_.size()));
    t.position_ = invert(t.order_);
    t.cost_ = cost;
    return t;
}

std::vector<Edge> Tour::edges() const {
    std::vector<Edge> out;
    out.reserve(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) {
        out.emplace_back(order_[i], order_[i + 1 == order_.size() ? 0 : i + 1]);
    }
    return out;
}

void Tour::reverse_run(std::size_t from, std::size_t to, Weight delta) {
    const std::size_t n = order_.size();
    std::size_t len = (to + n - from) % n + 1;
    std::size_t a = from;
    std::size_t b = to;
    for (len /= 2; len > 0; --len) {
        std::swap(order_[a], order_[b]);
        position_[static_cast<std::size_t>(order_[a])] = static_cast<NodeId>(a);
        position_[static_cast<std::size_t>(order_[b])] = static_cast<NodeId>(b);
        a = a + 1 == n ? 0 : a + 1;
        b = b == 0 ? n - 1 : b - 1;
    }
    cost_ += delta;
}

bool same_edges(const Tour& a, const Tour& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const NodeId v = a.at(i);
        const NodeId w = a.next(v);
        if (!b.has_edge(v, w)) return false;
    }
    return true;
}

Weight tour_cost(const TspInstance& inst, std::span<const NodeId> order) {
    Weight c = 0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) c += inst.distance(order[i], order[i + 1]);
    c += inst.distance(order.back(), order.front());
    return c;
}

std::optional<std::string> validate(std::span<const NodeId> order, std::size_t n) {
    if (order.size() != n) {
        return "length " + std::to_string(order.size()) + " != " + std::to_string(n);
    }
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = order[i];
        if (v < 0 || static_cast<std::size_t>(v) >= n) {
            return "node " + std::to_string(v) + " out of range at position " + std::to_string(i);
        }
        if (seen[static_cast<std::size_t>(v)]) {
            return "duplicate node " + std::to_string(v) + " at position " + std::to_string(i);
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
    return std::nullopt;
}

std::optional<std::string> validate(const Tour& t, std::size_t n) {
    if (auto v = validate(t.order(), n)) return v;
    if (t.positions().size() != n) return std::string("position array length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (t.position(t.at(i)) != i) {
            return "position of node " + std::to_string(t.at(i)) + " is not " + std::to_string(i);
        }
    }
    return std::nullopt;
}

bool is_valid_move(const TwoOptMove& m, std::size_t n) {
    return m.i < m.j && m.j < n && m.j >= m.i + 2 && !(m.i == 0 && m.j == n - 1);
}

Weight two_opt_delta(const Tour& t, const TspInstance& inst, const TwoOptMove& m) {
    const std::size_t n = t.size();
    const NodeId a = t.at(m.i);
    const NodeId b = t.at(m.i + 1);
    const NodeId c = t.at(m.j);
    const NodeId d = t.at(m.j + 1 == n ? 0 : m.j + 1);
    return inst.distance(a, c) + inst.distance(b, d) - inst.distance(a, b) - inst.distance(c, d);
}

void apply_two_opt(Tour& t, const TspInstance& inst, const TwoOptMove& m) {
    assert(is_valid_move(m, t.size()));
    const std::size_t n = t.size();
    const Weight delta = two_opt_delta(t, inst, m);
    const std::size_t inner = m.j - m.i;
    if (inner <= n - inner) {
        t.reverse_run(m.i + 1, m.j, delta);
    } else {
        t.reverse_run(m.j + 1 == n ? 0 : m.j + 1, m.i, delta);
    }
    assert(t.cost() == tour_cost(inst, t));
}

TwoOptMove random_two_opt_move(std::size_t n, Rng& rng) {
    if (n < 4) throw std::invalid_argument("2-opt needs at least 4 nodes");
    while (true) {
        std::size_t i = uniform_below(rng, n);
        std::size_t j = uniform_below(rng, n);
        if (i > j) std::swap(i, j);
        const TwoOptMove m{i, j};
        if (is_valid_move(m, n)) return m;
    }
}

Tour two_opt_move(const Tour& t, const TspInstance& inst, Rng& rng) {
    Tour out = t;
    apply_two_opt(out, inst, random_two_opt_move(t.size(), rng));
    return out;
}

Tour random_tour(const TspInstance& inst, Rng& rng) {
    std::vector<NodeId> order(inst.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    return Tour(std::move(order), inst);
}

bool two_opt_local_search(Tour& t, const TspInstance& inst, std::size_t max_passes) {
    const std::size_t n = t.size();
    if (n < 4) return true;
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i + 2 < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                const TwoOptMove m{i, j};
                if (!is_valid_move(m, n)) continue;
                if (two_opt_delta(t, inst, m) < 0) {
                    apply_two_opt(t, inst, m);
                    improved = true;
                }
            }
        }
        if (!improved) return true;
    }
    return false;
}

Tour read_tsplib_tour(std::istream& in, const TspInstance& inst) {
    std::string raw;
    std::size_t line_no = 0;
    bool in_section = false;
    std::vector<NodeId> order;
    while (std::getline(in, raw)) {
        ++line_no;
        std::istringstream ss(raw);
        if (!in_section) {
            std::string word;
            ss >> word;
            if (word.rfind("TOUR_SECTION", 0) == 0) in_section = true;
            continue;
        }
        std::string tok;
        while (ss >> tok) {
            if (tok == "EOF") break;
            std::int64_t id = 0;
            try {
                std::size_t pos = 0;
                id = std::stoll(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError(ParseError::Kind::MalformedTour, line_no, "bad tour entry '" + tok + "'");
            }
            if (id == -1) {
                in_section = false;
                break;
            }
            const NodeId v = inst.index_of(id);
            if (v < 0) {
                throw ParseError(ParseError::Kind::MalformedTour, line_no,
                                 "unknown node id " + std::to_string(id));
            }
            order.push_back(v);
        }
        if (!in_section) break;
    }
    if (auto violation = validate(order, inst.size())) {
        throw ParseError(ParseError::Kind::MalformedTour, 0, "tour: " + *violation);
    }
    return Tour(std::move(order), inst);
}

Tour load_tsplib_tour(const std::string& path, const TspInstance& inst) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_tsplib_tour(in, inst);
}

void write_tsplib_tour(std::ostream& out, const Tour& t, const TspInstance& inst,
                       const std::string& name) {
    out << "NAME : " << name << '\n'
        << "TYPE : TOUR\n"
        << "COMMENT : length " << t.cost() << '\n'
        << "DIMENSION : " << t.size() << '\n'
        << "TOUR_SECTION\n";
    for (const NodeId v : t.order()) out << inst.id_of(v) << '\n';
    out << "-1\nEOF\n";
}

}  // namespace eaxedo
