#include "eaxedo/diversity.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eaxedo {

int EdgeFrequencyTable::count(NodeId u, NodeId v) const {
    const NodeId lo = std::min(u, v);
    const NodeId hi = std::max(u, v);
    for (const auto& [w, c] : rows_[static_cast<std::size_t>(lo)]) {
        if (w == hi) return c;
    }
    return 0;
}

void EdgeFrequencyTable::add(NodeId u, NodeId v, int delta) {
    auto& row = rows_[static_cast<std::size_t>(std::min(u, v))];
    const NodeId hi = std::max(u, v);
    auto it = std::find_if(row.begin(), row.end(), [hi](const auto& e) { return e.first == hi; });
    if (it == row.end()) {
        if (delta < 0) throw std::logic_error("decrementing an edge that is not in the population");
        if (delta == 0) return;
        row.emplace_back(hi, delta);
        ++unique_;
    } else {
        if (it->second + delta < 0) throw std::logic_error("edge count would become negative");
        it->second += delta;
        if (it->second == 0) {
            *it = row.back();
            row.pop_back();
            --unique_;
        }
    }
    total_ += delta;
}

void EdgeFrequencyTable::add_tour(const Tour& t, int delta) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        const NodeId v = t.at(i);
        add(v, t.next(v), delta);
    }
}

int EdgeFrequencyTable::max_count() const {
    int m = 0;
    for (const auto& row : rows_) {
        for (const auto& e : row) m = std::max(m, e.second);
    }
    return m;
}

std::vector<std::pair<Edge, int>> EdgeFrequencyTable::entries() const {
    std::vector<std::pair<Edge, int>> out;
    out.reserve(unique_);
    for (std::size_t u = 0; u < rows_.size(); ++u) {
        for (const auto& [v, c] : rows_[u]) out.emplace_back(Edge(static_cast<NodeId>(u), v), c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double directed_contribution(int f, double total_directed) {
    if (f <= 0) return 0.0;
    const double p = static_cast<double>(f) / total_directed;
    return -p * std::log(p);
}

double delta_h(int f, int change, double total_directed) {
    return 2.0 * (directed_contribution(f + change, total_directed) -
                  directed_contribution(f, total_directed));
}

double delta_h(const EdgeFrequencyTable& freq, const Edge& e, int change, double total_directed) {
    const int f = freq.count(e);
    if (f + change < 0) throw std::logic_error("delta_h: decrement of an absent edge");
    return delta_h(f, change, total_directed);
}

double entropy_of(const EdgeFrequencyTable& freq, double total_directed) {
    double h = 0.0;
    for (const auto& [e, f] : freq.entries()) h += 2.0 * directed_contribution(f, total_directed);
    return h;
}

// --- Population ------------------------------------------------------------

Population::Population(std::size_t n, std::size_t mu) : n_(n), mu_(mu), freq_(n) {
    if (mu == 0) throw std::invalid_argument("population size must be positive");
}

Population::Population(std::vector<Tour> tours)
    : Population(tours.empty() ? 0 : tours.front().size(), tours.size()) {
    for (auto& t : tours) insert(std::move(t));
}

void Population::account(const Tour& t, int delta) {
    if (t.size() != n_) throw std::invalid_argument("tour size does not match population");
    for (std::size_t i = 0; i < n_; ++i) {
        const NodeId v = t.at(i);
        const NodeId w = t.next(v);
        const int before = freq_.count(v, w);
        freq_.add(v, w, delta);
        const int after = before + delta;
        if (static_cast<std::size_t>(std::max(before, after)) >= histogram_.size()) {
            histogram_.resize(static_cast<std::size_t>(std::max(before, after)) + 1, 0);
        }
        if (before > 0) --histogram_[static_cast<std::size_t>(before)];
        if (after > 0) ++histogram_[static_cast<std::size_t>(after)];
    }
}

double Population::entropy() const {
    const double total = total_directed();
    double h = 0.0;
    for (std::size_t f = 1; f < histogram_.size(); ++f) {
        if (histogram_[f] != 0) {
            h += static_cast<double>(histogram_[f]) * 2.0 *
                 directed_contribution(static_cast<int>(f), total);
        }
    }
    return h;
}

std::vector<int> Population::differences_to(const Tour& t) const {
    std::vector<int> d(tours_.size());
    for (std::size_t i = 0; i < tours_.size(); ++i) {
        int shared = 0;
        for (std::size_t k = 0; k < n_; ++k) {
            const NodeId v = t.at(k);
            shared += tours_[i].has_edge(v, t.next(v)) ? 1 : 0;
        }
        d[i] = 2 * (static_cast<int>(n_) - shared);
    }
    return d;
}

std::size_t Population::insert(Tour t) {
    account(t, +1);
    if (track_pairwise_) {
        const std::vector<int> d = differences_to(t);
        for (std::size_t i = 0; i < pairwise_.size(); ++i) pairwise_[i].push_back(d[i]);
        std::vector<int> row = d;
        row.push_back(0);
        pairwise_.push_back(std::move(row));
    }
    tours_.push_back(std::move(t));
    return tours_.size() - 1;
}

Tour Population::remove(std::size_t index) {
    Tour t = std::move(tours_.at(index));
    tours_.erase(tours_.begin() + static_cast<std::ptrdiff_t>(index));
    account(t, -1);
    if (track_pairwise_) {
        pairwise_.erase(pairwise_.begin() + static_cast<std::ptrdiff_t>(index));
        for (auto& row : pairwise_) row.erase(row.begin() + static_cast<std::ptrdiff_t>(index));
    }
    return t;
}

void Population::replace(std::size_t index, Tour t) {
    account(tours_.at(index), -1);
    account(t, +1);
    tours_[index] = std::move(t);
    if (track_pairwise_) {
        const std::vector<int> d = differences_to(tours_[index]);
        for (std::size_t i = 0; i < tours_.size(); ++i) {
            pairwise_[i][index] = d[i];
            pairwise_[index][i] = d[i];
        }
    }
}

void Population::track_pairwise(bool on) {
    track_pairwise_ = on;
    pairwise_.clear();
    if (!on) return;
    const std::vector<int> flat = pairwise_differences(tours_);
    const std::size_t m = tours_.size();
    pairwise_.assign(m, std::vector<int>(m));
    for (std::size_t i = 0; i < m; ++i) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(i * m), m, pairwise_[i].begin());
    }
}

std::size_t Population::best_index() const {
    if (tours_.empty()) throw std::logic_error("empty population");
    std::size_t best = 0;
    for (std::size_t i = 1; i < tours_.size(); ++i) {
        if (tours_[i].cost() < tours_[best].cost()) best = i;
    }
    return best;
}

Weight Population::max_cost() const {
    Weight m = std::numeric_limits<Weight>::min();
    for (const auto& t : tours_) m = std::max(m, t.cost());
    return m;
}

std::vector<std::size_t> Population::elite(double pct) const {
    const auto k = static_cast<std::size_t>(
        std::ceil(pct * static_cast<double>(tours_.size()) / 100.0 - 1e-9));
    std::vector<std::size_t> idx(tours_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return tours_[a].cost() < tours_[b].cost(); });
    idx.resize(std::min(k, idx.size()));
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

// Removal delta from the histogram of the member's edge counts: identical
// edge sets give bit-identical values regardless of tour rotation.
double removal_delta_impl(const Population& pop, std::size_t i, std::vector<int>& per_count) {
    const Tour& t = pop[i];
    std::fill(per_count.begin(), per_count.end(), 0);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const NodeId v = t.at(k);
        const int f = pop.freq().count(v, t.next(v));
        if (static_cast<std::size_t>(f) >= per_count.size()) per_count.resize(static_cast<std::size_t>(f) + 1, 0);
        ++per_count[static_cast<std::size_t>(f)];
    }
    const double total = pop.total_directed();
    double delta = 0.0;
    for (std::size_t f = 1; f < per_count.size(); ++f) {
        if (per_count[f] != 0) {
            delta += per_count[f] * delta_h(static_cast<int>(f), -1, total);
        }
    }
    return delta;
}

}  // namespace

double Population::removal_delta(std::size_t i) const {
    std::vector<int> scratch(size() + 2, 0);
    return removal_delta_impl(*this, i, scratch);
}

std::vector<double> Population::removal_deltas() const {
    const auto m = static_cast<std::int64_t>(size());
    std::vector<double> out(size());
#pragma omp parallel if (m * static_cast<std::int64_t>(n_) > 200000)
    {
        std::vector<int> scratch(size() + 2, 0);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < m; ++i) {
            out[static_cast<std::size_t>(i)] = removal_delta_impl(*this, static_cast<std::size_t>(i), scratch);
        }
    }
    return out;
}

// --- measures ----------------------------------------------------------------

std::int64_t edge_diversity(const Population& pop) {
    // sum_p sum_q |E(p)\E(q)| = 2n m^2 - sum over directed edges of f^2.
    const auto m = static_cast<std::int64_t>(pop.size());
    const auto n = static_cast<std::int64_t>(pop.n());
    std::int64_t squares = 0;
    for (const auto& [e, f] : pop.freq().entries()) squares += static_cast<std::int64_t>(f) * f;
    return 2 * n * m * m - 2 * squares;
}

namespace {

int shared_undirected(const Tour& p, const Tour& q) {
    int shared = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const NodeId v = p.at(k);
        shared += q.has_edge(v, p.next(v)) ? 1 : 0;
    }
    return shared;
}

}  // namespace

std::vector<int> pairwise_differences(std::span<const Tour> tours) {
    const std::size_t m = tours.size();
    std::vector<int> d(m * m, 0);
    const auto rows = static_cast<std::int64_t>(m);
    const auto work = rows * rows * static_cast<std::int64_t>(m == 0 ? 0 : tours[0].size());
#pragma omp parallel for schedule(dynamic, 1) if (work > 500000)
    for (std::int64_t i = 0; i < rows; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        for (std::size_t j = ui + 1; j < m; ++j) {
            const int diff = 2 * (static_cast<int>(tours[ui].size()) - shared_undirected(tours[ui], tours[j]));
            d[ui * m + j] = diff;
            d[j * m + ui] = diff;
        }
    }
    return d;
}

double pairwise_diversity(const Population& pop) {
    const std::size_t m = pop.size();
    if (m < 2) throw std::invalid_argument("pairwise diversity needs at least two members");
    std::vector<int> flat;
    if (!pop.tracks_pairwise()) flat = pairwise_differences(pop.tours());
    auto at = [&](std::size_t i, std::size_t j) {
        return pop.tracks_pairwise() ? pop.pairwise(i, j) : flat[i * m + j];
    };
    std::int64_t sum = 0;
    for (std::size_t p = 0; p < m; ++p) {
        int best = std::numeric_limits<int>::max();
        for (std::size_t q = 0; q < m; ++q) {
            if (q != p) best = std::min(best, at(p, q));
        }
        sum += best;
    }
    return static_cast<double>(sum) / static_cast<double>(pop.n() * m);
}

// --- removal selection ---------------------------------------------------------

namespace {

std::vector<char> protection_mask(std::size_t m, std::span<const std::size_t> protected_idx) {
    std::vector<char> mask(m, 0);
    for (const std::size_t i : protected_idx) {
        if (i < m) mask[i] = 1;
    }
    if (std::all_of(mask.begin(), mask.end(), [](char c) { return c != 0; })) {
        throw std::invalid_argument("every population member is protected");
    }
    return mask;
}

template <typename Score>
std::size_t argmax_unprotected(std::size_t m, const std::vector<char>& mask, Score score) {
    std::size_t best = m;
    for (std::size_t i = 0; i < m; ++i) {
        if (mask[i]) continue;
        if (best == m || score(i) > score(best)) best = i;
    }
    return best;
}

}  // namespace

std::size_t worst_for_entropy(const Population& pop, std::span<const std::size_t> protected_idx) {
    const auto mask = protection_mask(pop.size(), protected_idx);
    const std::vector<double> deltas = pop.removal_deltas();
    return argmax_unprotected(pop.size(), mask, [&](std::size_t i) { return deltas[i]; });
}

std::size_t worst_for_edge_diversity(const Population& pop,
                                     std::span<const std::size_t> protected_idx) {
    // ED(P\{q}) = const + 4 * sum_{e in q} f(e): drop the member whose edges are most common.
    const auto mask = protection_mask(pop.size(), protected_idx);
    std::vector<std::int64_t> load(pop.size(), 0);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const Tour& t = pop[i];
        for (std::size_t k = 0; k < t.size(); ++k) {
            const NodeId v = t.at(k);
            load[i] += pop.freq().count(v, t.next(v));
        }
    }
    return argmax_unprotected(pop.size(), mask, [&](std::size_t i) { return load[i]; });
}

std::size_t worst_for_pairwise_diversity(const Population& pop,
                                         std::span<const std::size_t> protected_idx) {
    const std::size_t m = pop.size();
    const auto mask = protection_mask(m, protected_idx);
    if (m < 3) {
        return argmax_unprotected(m, mask, [](std::size_t) { return 0; });
    }
    std::vector<int> flat;
    if (!pop.tracks_pairwise()) flat = pairwise_differences(pop.tours());
    auto at = [&](std::size_t i, std::size_t j) {
        return pop.tracks_pairwise() ? pop.pairwise(i, j) : flat[i * m + j];
    };
    // Per row: smallest and second-smallest off-diagonal entry.
    std::vector<int> min1(m), min2(m);
    std::vector<std::size_t> arg1(m);
    for (std::size_t p = 0; p < m; ++p) {
        int a = std::numeric_limits<int>::max();
        int b = a;
        std::size_t ia = m;
        for (std::size_t q = 0; q < m; ++q) {
            if (q == p) continue;
            const int d = at(p, q);
            if (d < a) {
                b = a;
                a = d;
                ia = q;
            } else if (d < b) {
                b = d;
            }
        }
        min1[p] = a;
        min2[p] = b;
        arg1[p] = ia;
    }
    std::vector<std::int64_t> remaining(m, 0);
    for (std::size_t q = 0; q < m; ++q) {
        std::int64_t s = 0;
        for (std::size_t p = 0; p < m; ++p) {
            if (p != q) s += arg1[p] == q ? min2[p] : min1[p];
        }
        remaining[q] = s;
    }
    return argmax_unprotected(m, mask, [&](std::size_t i) { return remaining[i]; });
}

std::size_t remove_worst_for_entropy(Population& pop, std::span<const std::size_t> protected_idx) {
    const std::size_t idx = worst_for_entropy(pop, protected_idx);
    pop.remove(idx);
    return idx;
}

namespace reference {

std::vector<int> pairwise_differences(std::span<const Tour> tours) {
    const std::size_t m = tours.size();
    std::vector<int> d(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j) d[i * m + j] = 2 * (static_cast<int>(tours[i].size()) - shared_undirected(tours[i], tours[j]));
        }
    }
    return d;
}

std::vector<double> removal_deltas(const Population& pop) {
    std::vector<double> out(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) out[i] = pop.removal_delta(i);
    return out;
}

}  // namespace reference

}  // namespace eaxedo
