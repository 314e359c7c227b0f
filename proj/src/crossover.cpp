#include "eaxedo/crossover.hpp"

#include <algorithm>
#include <cassert>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eaxedo {

namespace {

constexpr std::size_t kParallelPairs = 1u << 16;

// Up to two differing neighbours per node and edge class.
struct SideLists {
    std::vector<std::array<NodeId, 2>> nb;
    std::vector<std::uint8_t> deg;

    explicit SideLists(std::size_t n) : nb(n, {-1, -1}), deg(n, 0) {}
    void push(NodeId v, NodeId w) {
        auto& d = deg[static_cast<std::size_t>(v)];
        nb[static_cast<std::size_t>(v)][d++] = w;
    }
    void erase(NodeId v, NodeId w) {
        auto& l = nb[static_cast<std::size_t>(v)];
        auto& d = deg[static_cast<std::size_t>(v)];
        if (l[0] == w) l[0] = l[1];
        l[1] = -1;
        --d;
    }
};

}  // namespace

std::optional<std::string> check_ab_cycle(const AbCycle& cyc, const Tour& p1, const Tour& p2) {
    const std::size_t k = cyc.edge_count();
    if (k < 4 || k % 2 != 0) return "cycle length " + std::to_string(k) + " is not even and >= 4";
    std::vector<Edge> seen;
    seen.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Edge e = cyc.edge(i);
        if (e.a == e.b) return "self loop at edge " + std::to_string(i);
        const bool in1 = p1.has_edge(e.a, e.b);
        const bool in2 = p2.has_edge(e.a, e.b);
        if (AbCycle::is_a_edge(i) && !(in1 && !in2)) {
            return "edge " + std::to_string(i) + " is not an edge of p1 only";
        }
        if (!AbCycle::is_a_edge(i) && !(in2 && !in1)) {
            return "edge " + std::to_string(i) + " is not an edge of p2 only";
        }
        seen.push_back(e);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return std::string("repeated edge");
    return std::nullopt;
}

AbCycle derive_ab_cycle(const Tour& p1, const Tour& p2, Rng& rng) {
    const std::size_t n = p1.size();
    SideLists a(n);
    SideLists b(n);
    std::vector<NodeId> starts;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = static_cast<NodeId>(i);
        for (const NodeId w : {p1.prev(v), p1.next(v)}) {
            if (!p2.has_edge(v, w)) a.push(v, w);
        }
        for (const NodeId w : {p2.prev(v), p2.next(v)}) {
            if (!p1.has_edge(v, w)) b.push(v, w);
        }
        if (a.deg[i] > 0) starts.push_back(v);
    }
    if (starts.empty()) throw NoEffectiveCycle();

    // Latest path index of each node per index parity.
    std::vector<std::array<int, 2>> at(n, {-1, -1});
    std::vector<NodeId> path;
    path.push_back(starts[uniform_below(rng, starts.size())]);
    at[static_cast<std::size_t>(path[0])][0] = 0;

    while (true) {
        const std::size_t k = path.size() - 1;
        const NodeId cur = path.back();
        SideLists& side = k % 2 == 0 ? a : b;
        const auto d = side.deg[static_cast<std::size_t>(cur)];
        if (d == 0) throw std::logic_error("AB-cycle trace got stuck");
        const NodeId nxt = side.nb[static_cast<std::size_t>(cur)][uniform_below(rng, d)];
        side.erase(cur, nxt);
        side.erase(nxt, cur);
        path.push_back(nxt);

        const std::size_t kk = k + 1;
        int& slot = at[static_cast<std::size_t>(nxt)][kk % 2];
        if (slot >= 0) {
            const auto first = static_cast<std::size_t>(slot);
            AbCycle cyc;
            cyc.nodes.assign(path.begin() + static_cast<std::ptrdiff_t>(first),
                             path.begin() + static_cast<std::ptrdiff_t>(kk));
            // Start on an A-edge.
            if (first % 2 == 1) std::rotate(cyc.nodes.begin(), cyc.nodes.begin() + 1, cyc.nodes.end());
            return cyc;
        }
        slot = static_cast<int>(kk);
    }
}

IntermediateSolution::IntermediateSolution(const Tour& p1, const AbCycle& cyc, const TspInstance& inst)
    : link_(p1.size()), sub_(p1.size(), -1), cost_(p1.cost()) {
    const std::size_t n = p1.size();
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = static_cast<NodeId>(i);
        link_[i] = {p1.prev(v), p1.next(v)};
    }
    for (std::size_t i = 0; i < cyc.edge_count(); i += 2) {
        const Edge e = cyc.edge(i);
        if (!has_edge(e.a, e.b)) throw std::invalid_argument("A-edge is not in the first parent");
        replace_link(e.a, e.b, kNone);
        replace_link(e.b, e.a, kNone);
        cost_ -= inst.distance(e.a, e.b);
    }
    for (std::size_t i = 1; i < cyc.edge_count(); i += 2) {
        const Edge e = cyc.edge(i);
        replace_link(e.a, kNone, e.b);
        replace_link(e.b, kNone, e.a);
        cost_ += inst.distance(e.a, e.b);
    }
    label_subtours();
}

IntermediateSolution IntermediateSolution::from_cycles(const std::vector<std::vector<NodeId>>& cycles,
                                                       const TspInstance& inst) {
    const std::size_t n = inst.size();
    IntermediateSolution t;
    t.link_.assign(n, {kNone, kNone});
    t.sub_.assign(n, -1);
    std::size_t covered = 0;
    for (const auto& c : cycles) {
        if (c.size() < 3) throw std::invalid_argument("cycle shorter than 3");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const NodeId v = c[i];
            if (v < 0 || static_cast<std::size_t>(v) >= n || t.link_[static_cast<std::size_t>(v)][0] != kNone) {
                throw std::invalid_argument("cycles must cover each node exactly once");
            }
            const NodeId w = c[(i + 1) % c.size()];
            t.link_[static_cast<std::size_t>(v)] = {c[(i + c.size() - 1) % c.size()], w};
            t.cost_ += inst.distance(v, w);
        }
        covered += c.size();
    }
    if (covered != n) throw std::invalid_argument("cycles must cover each node exactly once");
    t.label_subtours();
    return t;
}

void IntermediateSolution::label_subtours() {
    const std::size_t n = link_.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (sub_[s] >= 0) continue;
        const int id = static_cast<int>(sub_size_.size());
        std::size_t len = 0;
        NodeId prev = kNone;
        NodeId cur = static_cast<NodeId>(s);
        do {
            sub_[static_cast<std::size_t>(cur)] = id;
            ++len;
            const auto& l = link_[static_cast<std::size_t>(cur)];
            const NodeId nxt = l[0] != prev ? l[0] : l[1];
            prev = cur;
            cur = nxt;
        } while (cur != static_cast<NodeId>(s));
        sub_size_.push_back(len);
        sub_head_.push_back(static_cast<NodeId>(s));
    }
    n_sub_ = sub_size_.size();
}

void IntermediateSolution::replace_link(NodeId v, NodeId from, NodeId to) {
    auto& l = link_[static_cast<std::size_t>(v)];
    if (l[0] == from) {
        l[0] = to;
    } else if (l[1] == from) {
        l[1] = to;
    } else {
        throw std::logic_error("link to replace not found");
    }
}

std::vector<int> IntermediateSolution::subtour_ids() const {
    std::vector<int> ids;
    for (std::size_t i = 0; i < sub_size_.size(); ++i) {
        if (sub_size_[i] > 0) ids.push_back(static_cast<int>(i));
    }
    return ids;
}

std::vector<Edge> IntermediateSolution::subtour_edges(int id) const {
    std::vector<Edge> out;
    const NodeId head = sub_head_[static_cast<std::size_t>(id)];
    out.reserve(sub_size_[static_cast<std::size_t>(id)]);
    NodeId prev = kNone;
    NodeId cur = head;
    do {
        const auto& l = link_[static_cast<std::size_t>(cur)];
        const NodeId nxt = l[0] != prev ? l[0] : l[1];
        out.emplace_back(cur, nxt);
        prev = cur;
        cur = nxt;
    } while (cur != head);
    return out;
}

void IntermediateSolution::reconnect(NodeId a, NodeId b, NodeId c, NodeId d, const TspInstance& inst) {
    if (!has_edge(a, b) || !has_edge(c, d)) throw std::invalid_argument("reconnect: edge not present");
    const int ra = subtour_of(a);
    const int rc = subtour_of(c);
    if (ra == rc) throw std::invalid_argument("reconnect: edges in the same sub-tour");
    replace_link(a, b, c);
    replace_link(b, a, d);
    replace_link(c, d, a);
    replace_link(d, c, b);
    cost_ += inst.distance(a, c) + inst.distance(b, d) - inst.distance(a, b) - inst.distance(c, d);
    added_.emplace_back(a, c);
    added_.emplace_back(b, d);

    // Relabel the smaller side.
    const auto ua = static_cast<std::size_t>(ra);
    const auto uc = static_cast<std::size_t>(rc);
    const bool keep_c = sub_size_[uc] >= sub_size_[ua];
    const int keep = keep_c ? rc : ra;
    const int drop = keep_c ? ra : rc;
    for (std::size_t v = 0; v < sub_.size(); ++v) {
        if (sub_[v] == drop) sub_[v] = keep;
    }
    sub_size_[static_cast<std::size_t>(keep)] += sub_size_[static_cast<std::size_t>(drop)];
    sub_size_[static_cast<std::size_t>(drop)] = 0;
    --n_sub_;
}

Tour IntermediateSolution::to_tour() const {
    if (n_sub_ != 1) throw std::logic_error("intermediate solution has several sub-tours");
    std::vector<NodeId> order;
    order.reserve(link_.size());
    NodeId prev = kNone;
    NodeId cur = 0;
    do {
        order.push_back(cur);
        const auto& l = link_[static_cast<std::size_t>(cur)];
        const NodeId nxt = l[0] != prev ? l[0] : l[1];
        prev = cur;
        cur = nxt;
    } while (cur != 0);
    return Tour::from_order(std::move(order), cost_);
}

std::optional<std::string> IntermediateSolution::validate(const TspInstance& inst) const {
    const std::size_t n = link_.size();
    Weight twice = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const auto& l = link_[v];
        for (const NodeId w : l) {
            if (w < 0 || static_cast<std::size_t>(w) >= n || static_cast<std::size_t>(w) == v) {
                return "bad link at node " + std::to_string(v);
            }
            if (!has_edge(w, static_cast<NodeId>(v))) return "asymmetric link at node " + std::to_string(v);
            twice += inst.distance(static_cast<NodeId>(v), w);
        }
        if (l[0] == l[1]) return "double edge at node " + std::to_string(v);
    }
    if (twice != 2 * cost_) return std::string("cached cost mismatch");
    std::vector<std::size_t> counted(sub_size_.size(), 0);
    for (std::size_t v = 0; v < n; ++v) {
        const int id = sub_[v];
        if (id < 0 || static_cast<std::size_t>(id) >= sub_size_.size()) return std::string("bad sub-tour id");
        ++counted[static_cast<std::size_t>(id)];
        for (const NodeId w : link_[v]) {
            if (sub_[static_cast<std::size_t>(w)] != id) return std::string("link crosses sub-tours");
        }
    }
    std::size_t live = 0;
    for (std::size_t i = 0; i < counted.size(); ++i) {
        if (counted[i] != sub_size_[i]) return "size mismatch for sub-tour " + std::to_string(i);
        live += counted[i] > 0 ? 1 : 0;
    }
    if (live != n_sub_) return std::string("sub-tour count mismatch");
    return std::nullopt;
}

// ---- search A --------------------------------------------------------------

namespace {

void consider_a(Reconnection& best, bool& found, NodeId a, NodeId b, NodeId c, NodeId d,
                const TspInstance& inst) {
    const Weight base = -inst.distance(a, b) - inst.distance(c, d);
    const Weight d1 = base + inst.distance(a, c) + inst.distance(b, d);
    const Weight d2 = base + inst.distance(a, d) + inst.distance(b, c);
    if (!found || d1 < best.delta) {
        best = {a, b, c, d, d1, 0.0};
        found = true;
    }
    if (d2 < best.delta) best = {a, b, d, c, d2, 0.0};
}

}  // namespace

Reconnection best_search_a(const IntermediateSolution& t, const NearestNeighborLists& nn,
                           const TspInstance& inst) {
    if (t.subtour_count() < 2) throw std::invalid_argument("search A needs two or more sub-tours");
    int r = -1;
    for (const int id : t.subtour_ids()) {
        if (r < 0 || t.subtour_size(id) < t.subtour_size(r)) r = id;
    }
    const std::vector<Edge> ring = t.subtour_edges(r);

    Reconnection best;
    bool found = false;
    for (const Edge& e1 : ring) {
        for (const NodeId x : {e1.a, e1.b}) {
            for (const NodeId c : nn.of(x)) {
                if (t.subtour_of(c) == r) continue;
                for (const NodeId d : t.links(c)) consider_a(best, found, e1.a, e1.b, c, d, inst);
            }
        }
    }
    if (!found) {
        const auto n = static_cast<NodeId>(t.size());
        for (const Edge& e1 : ring) {
            for (NodeId c = 0; c < n; ++c) {
                if (t.subtour_of(c) == r) continue;
                for (const NodeId d : t.links(c)) consider_a(best, found, e1.a, e1.b, c, d, inst);
            }
        }
    }
    assert(found);
    return best;
}

void search_a_step(IntermediateSolution& t, const NearestNeighborLists& nn, const TspInstance& inst) {
    const Reconnection m = best_search_a(t, nn, inst);
    t.reconnect(m.a, m.b, m.c, m.d, inst);
}

// ---- search B --------------------------------------------------------------

double reconnection_gain(const EdgeFrequencyTable& freq, double total_directed, NodeId a, NodeId b,
                         NodeId c, NodeId d) {
    const double removed = delta_h(freq.count(a, b) + 1, -1, total_directed) +
                           delta_h(freq.count(c, d) + 1, -1, total_directed);
    const double added = delta_h(freq.count(a, c), +1, total_directed) +
                         delta_h(freq.count(b, d), +1, total_directed);
    return removed + added;
}

namespace {

using LexKey = std::array<Edge, 4>;

LexKey lex_key(const Reconnection& m) {
    return {Edge(m.a, m.b), Edge(m.c, m.d), Edge(m.a, m.c), Edge(m.b, m.d)};
}

// Strict total order: higher gain, then lower delta, then smaller edges.
bool better_b(const Reconnection& x, const Reconnection& y) {
    if (x.gain != y.gain) return x.gain > y.gain;
    if (x.delta != y.delta) return x.delta < y.delta;
    return lex_key(x) < lex_key(y);
}

struct BestB {
    Reconnection m;
    bool found = false;
    std::size_t feasible = 0;

    void offer(const Reconnection& c) {
        ++feasible;
        if (!found || better_b(c, m)) {
            m = c;
            found = true;
        }
    }
    void merge(const BestB& o) {
        feasible += o.feasible;
        if (o.found && (!found || better_b(o.m, m))) {
            m = o.m;
            found = true;
        }
    }
};

struct SearchBInput {
    const IntermediateSolution& t;
    const EdgeFrequencyTable& freq;
    double total_directed;
    Weight c_max;
    const TspInstance& inst;
    const SearchBOptions& opts;
    std::vector<Edge> r1;
    std::vector<Edge> r2;
    int id2 = -1;
};

void try_pair(BestB& acc, const SearchBInput& in, const Edge& e1, NodeId c, NodeId d) {
    const Weight base = in.t.cost() - in.inst.distance(e1.a, e1.b) - in.inst.distance(c, d);
    for (int flip = 0; flip < 2; ++flip) {
        const NodeId cc = flip == 0 ? c : d;
        const NodeId dd = flip == 0 ? d : c;
        const Weight cost = base + in.inst.distance(e1.a, cc) + in.inst.distance(e1.b, dd);
        if (cost > in.c_max) continue;
        Reconnection m{e1.a, e1.b, cc, dd, cost - in.t.cost(), 0.0};
        m.gain = reconnection_gain(in.freq, in.total_directed, m.a, m.b, m.c, m.d);
        acc.offer(m);
    }
}

void scan_e1(BestB& acc, const SearchBInput& in, const Edge& e1) {
    if (in.opts.neighbors == 0) {
        for (const Edge& e2 : in.r2) try_pair(acc, in, e1, e2.a, e2.b);
        return;
    }
    // Partner edges touching a near neighbour; each visited once per e1.
    std::vector<Edge> cand;
    const std::size_t k = std::min(in.opts.neighbors, in.opts.nn->k());
    for (const NodeId x : {e1.a, e1.b}) {
        const auto list = in.opts.nn->of(x);
        for (std::size_t i = 0; i < k; ++i) {
            const NodeId c = list[i];
            if (in.t.subtour_of(c) != in.id2) continue;
            for (const NodeId d : in.t.links(c)) cand.emplace_back(c, d);
        }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (const Edge& e2 : cand) try_pair(acc, in, e1, e2.a, e2.b);
}

SearchBInput prepare_b(const IntermediateSolution& t, const EdgeFrequencyTable& freq, double total_directed,
                       Weight c_max, const TspInstance& inst, const SearchBOptions& opts) {
    if (t.subtour_count() != 2) throw std::invalid_argument("search B needs exactly two sub-tours");
    if (opts.neighbors > 0 && opts.nn == nullptr) {
        throw std::invalid_argument("restricted search B needs neighbour lists");
    }
    const auto ids = t.subtour_ids();
    // Iterate e1 over the smaller sub-tour.
    const bool swap = t.subtour_size(ids[1]) < t.subtour_size(ids[0]);
    const int id1 = swap ? ids[1] : ids[0];
    const int id2 = swap ? ids[0] : ids[1];
    return {t, freq, total_directed, c_max, inst, opts, t.subtour_edges(id1), t.subtour_edges(id2), id2};
}

std::optional<Reconnection> finish(const BestB& acc, std::size_t* feasible) {
    if (feasible != nullptr) *feasible = acc.feasible;
    if (!acc.found) return std::nullopt;
    return acc.m;
}

std::optional<Reconnection> search_b_parallel(const IntermediateSolution& t, const EdgeFrequencyTable& freq,
                                              double total_directed, Weight c_max, const TspInstance& inst,
                                              const SearchBOptions& opts, std::size_t* feasible) {
    const SearchBInput in = prepare_b(t, freq, total_directed, c_max, inst, opts);
    const auto m1 = static_cast<std::ptrdiff_t>(in.r1.size());
    BestB total;
    if (in.r1.size() * in.r2.size() < kParallelPairs) {
        for (const Edge& e1 : in.r1) scan_e1(total, in, e1);
        return finish(total, feasible);
    }
#pragma omp parallel
    {
        BestB local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < m1; ++i) scan_e1(local, in, in.r1[static_cast<std::size_t>(i)]);
#pragma omp critical(eaxedo_search_b)
        total.merge(local);
    }
    return finish(total, feasible);
}

}  // namespace

std::optional<Reconnection> best_search_b(const IntermediateSolution& t, const EdgeFrequencyTable& freq,
                                          double total_directed, Weight c_max, const TspInstance& inst,
                                          const SearchBOptions& opts) {
    return search_b_parallel(t, freq, total_directed, c_max, inst, opts, nullptr);
}

namespace reference {

std::optional<Reconnection> best_search_b(const IntermediateSolution& t, const EdgeFrequencyTable& freq,
                                          double total_directed, Weight c_max, const TspInstance& inst,
                                          const SearchBOptions& opts) {
    const SearchBInput in = prepare_b(t, freq, total_directed, c_max, inst, opts);
    BestB acc;
    for (const Edge& e1 : in.r1) scan_e1(acc, in, e1);
    return finish(acc, nullptr);
}

}  // namespace reference

std::optional<Tour> search_b(IntermediateSolution t, const EdgeFrequencyTable& freq, double total_directed,
                             Weight c_max, const TspInstance& inst, const SearchBOptions& opts) {
    const auto m = best_search_b(t, freq, total_directed, c_max, inst, opts);
    if (!m) return std::nullopt;
    t.reconnect(m->a, m->b, m->c, m->d, inst);
    return t.to_tour();
}

// ---- operators -------------------------------------------------------------

namespace {

IntermediateSolution start(const Tour& p1, const Tour& p2, const TspInstance& inst, Rng& rng,
                           CrossoverTrace* trace) {
    const AbCycle cyc = derive_ab_cycle(p1, p2, rng);
    IntermediateSolution t(p1, cyc, inst);
    if (trace != nullptr) {
        *trace = {};
        trace->cycle_edges = cyc.edge_count();
        trace->initial_subtours = t.subtour_count();
    }
    return t;
}

void reduce_to(IntermediateSolution& t, std::size_t target, const NearestNeighborLists& nn,
               const TspInstance& inst, CrossoverTrace* trace) {
    while (t.subtour_count() > target) {
        search_a_step(t, nn, inst);
        if (trace != nullptr) ++trace->search_a_steps;
    }
}

std::optional<Tour> close_with_b(const IntermediateSolution& t, const EntropyContext& ctx, Weight c_max,
                                 const TspInstance& inst, const SearchBOptions& opts, CrossoverTrace* trace) {
    if (ctx.freq == nullptr) throw std::invalid_argument("EAX-EDO needs a frequency table");
    if (t.subtour_count() == 1) {
        if (t.cost() > c_max) return std::nullopt;
        return t.to_tour();
    }
    std::size_t feasible = 0;
    const auto m = search_b_parallel(t, *ctx.freq, ctx.total_directed, c_max, inst, opts, &feasible);
    if (trace != nullptr) trace->search_b_feasible = feasible;
    if (!m) return std::nullopt;
    IntermediateSolution done = t;
    done.reconnect(m->a, m->b, m->c, m->d, inst);
    return done.to_tour();
}

}  // namespace

Tour eax_1ab(const Tour& p1, const Tour& p2, const NearestNeighborLists& nn, const TspInstance& inst,
             Rng& rng, CrossoverTrace* trace) {
    IntermediateSolution t = start(p1, p2, inst, rng, trace);
    reduce_to(t, 1, nn, inst, trace);
    return t.to_tour();
}

std::optional<Tour> eax_edo(const Tour& p1, const Tour& p2, const EntropyContext& ctx, Weight c_max,
                            const NearestNeighborLists& nn, const TspInstance& inst, Rng& rng,
                            const SearchBOptions& opts, CrossoverTrace* trace) {
    IntermediateSolution t = start(p1, p2, inst, rng, trace);
    reduce_to(t, 2, nn, inst, trace);
    return close_with_b(t, ctx, c_max, inst, opts, trace);
}

OffspringPair eax_pair(const Tour& p1, const Tour& p2, const EntropyContext& ctx, Weight c_max,
                       const NearestNeighborLists& nn, const TspInstance& inst, Rng& rng,
                       const SearchBOptions& opts, CrossoverTrace* trace) {
    IntermediateSolution t = start(p1, p2, inst, rng, trace);
    reduce_to(t, 2, nn, inst, trace);
    std::optional<Tour> diverse = close_with_b(t, ctx, c_max, inst, opts, trace);
    reduce_to(t, 1, nn, inst, nullptr);
    return {t.to_tour(), std::move(diverse)};
}

}  // namespace eaxedo
