#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "eaxedo/diversity.hpp"
#include "oracles.hpp"

using namespace eaxedo;

namespace {

Population two_tour_square() {
    const TspInstance sq = oracle::unit_square();
    return Population({Tour({0, 1, 2, 3}, sq), Tour({0, 2, 1, 3}, sq)});
}

std::vector<Tour> random_tours(const TspInstance& inst, std::size_t count, Rng& rng) {
    std::vector<Tour> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_tour(inst, rng));
    return out;
}

// Random tours near a common base, so edges repeat with varied counts.
std::vector<Tour> clustered_tours(const TspInstance& inst, std::size_t count, Rng& rng) {
    const Tour base = random_tour(inst, rng);
    std::vector<Tour> out;
    for (std::size_t i = 0; i < count; ++i) {
        Tour t = base;
        const auto moves = uniform_below<std::size_t>(rng, 4);
        for (std::size_t k = 0; k < moves; ++k) t = two_opt_move(t, inst, rng);
        out.push_back(t);
    }
    return out;
}

}  // namespace

TEST(Diversity, FrozenValuesTwoToursOnSquare) {
    const Population pop = two_tour_square();
    EXPECT_NEAR(pop.entropy(), 2.4260, 1e-4);
    EXPECT_EQ(edge_diversity(pop), 8);
    EXPECT_DOUBLE_EQ(pairwise_diversity(pop), 1.0);
    // New edge into a population of normaliser 16.
    EXPECT_NEAR(delta_h(0, 1, 16.0), 0.3466, 1e-4);
    EXPECT_EQ(pop.freq().count(1, 2), 2);
    EXPECT_EQ(pop.freq().count(0, 1), 1);
    EXPECT_EQ(pop.freq().count(0, 0 + 2), 1);
    EXPECT_EQ(pop.freq().unique_edges(), 6u);
    EXPECT_EQ(pop.freq().total(), 8);
}

TEST(Diversity, IdenticalToursHaveMinimumEntropy) {
    Rng rng(2);
    const TspInstance inst = oracle::random_instance(25, rng);
    const Tour t = random_tour(inst, rng);
    const Population pop(std::vector<Tour>(7, t));
    EXPECT_NEAR(pop.entropy(), min_entropy(25), 1e-12);
    EXPECT_EQ(edge_diversity(pop), 0);
    EXPECT_DOUBLE_EQ(pairwise_diversity(pop), 0.0);
}

TEST(Diversity, EdgeDisjointToursReachUpperBound) {
    // n = 5 complete graph splits into two edge-disjoint Hamiltonian cycles.
    const TspInstance inst("k5", {{0, 0}, {10, 0}, {13, 9}, {5, 15}, {-3, 9}}, EdgeWeightKind::Euc2d);
    const Population pop({Tour({0, 1, 2, 3, 4}, inst), Tour({0, 2, 4, 1, 3}, inst)});
    EXPECT_NEAR(pop.entropy(), std::log(20.0), 1e-12);
    EXPECT_EQ(edge_diversity(pop), 2 * 10);
    EXPECT_DOUBLE_EQ(pairwise_diversity(pop), 2.0);
}

TEST(Diversity, MatchesBruteForceOnRandomPopulations) {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 5 + uniform_below<std::size_t>(rng, 20);
        const std::size_t mu = 2 + uniform_below<std::size_t>(rng, 9);
        const TspInstance inst = oracle::random_instance(n, rng);
        const auto tours = trial % 2 ? random_tours(inst, mu, rng) : clustered_tours(inst, mu, rng);
        const Population pop(tours);
        const auto orders = oracle::orders(tours);
        const double T = 2.0 * static_cast<double>(n * mu);
        ASSERT_NEAR(pop.entropy(), oracle::entropy(orders, T), 1e-9);
        ASSERT_EQ(edge_diversity(pop), oracle::edge_diversity(orders));
        ASSERT_NEAR(pairwise_diversity(pop), oracle::pairwise_diversity(orders, n), 1e-12);
        // ED identity through edge counts.
        std::int64_t sq = 0;
        for (const auto& [e, f] : pop.freq().entries()) sq += static_cast<std::int64_t>(f) * f;
        ASSERT_EQ(edge_diversity(pop), static_cast<std::int64_t>(2 * n * mu * mu) - 2 * sq);
        ASSERT_GE(pop.entropy(), min_entropy(n) - 1e-12);
    }
}

TEST(Diversity, RemovalDeltaAndSelectionMatchBruteForce) {
    Rng rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 6 + uniform_below<std::size_t>(rng, 10);
        const std::size_t mu = 3 + uniform_below<std::size_t>(rng, 6);
        const TspInstance inst = oracle::random_instance(n, rng);
        const Population pop(clustered_tours(inst, mu, rng));
        const auto orders = oracle::orders(pop.tours());
        const double T = pop.total_directed();
        const double h = oracle::entropy(orders, T);
        std::vector<double> h_without(mu);
        std::vector<std::int64_t> ed_without(mu);
        std::vector<double> pd_without(mu);
        for (std::size_t i = 0; i < mu; ++i) {
            auto rest = orders;
            rest.erase(rest.begin() + static_cast<long>(i));
            h_without[i] = oracle::entropy(rest, T);
            ed_without[i] = oracle::edge_diversity(rest);
            pd_without[i] = rest.size() >= 2 ? oracle::pairwise_diversity(rest, n) : 0.0;
            ASSERT_NEAR(pop.removal_delta(i), h_without[i] - h, 1e-9);
        }
        const std::vector<std::size_t> prot{pop.best_index()};
        auto argmax = [&](const auto& v) {
            std::size_t best = mu;
            for (std::size_t i = 0; i < mu; ++i) {
                if (i == prot[0]) continue;
                if (best == mu || v[i] > v[best] + 1e-9) best = i;
            }
            return best;
        };
        const std::size_t we = worst_for_entropy(pop, prot);
        ASSERT_NE(we, prot[0]);
        ASSERT_NEAR(h_without[we], h_without[argmax(h_without)], 1e-9);
        ASSERT_EQ(ed_without[worst_for_edge_diversity(pop, prot)], ed_without[argmax(ed_without)]);
        if (mu >= 3) {
            const std::size_t wp = worst_for_pairwise_diversity(pop, prot);
            ASSERT_NEAR(pd_without[wp], pd_without[argmax(pd_without)], 1e-12);
        }
    }
}

TEST(Diversity, AllProtectedThrows) {
    const Population pop = two_tour_square();
    const std::vector<std::size_t> all{0, 1};
    EXPECT_THROW(worst_for_entropy(pop, all), std::invalid_argument);
}

TEST(Diversity, NoDriftOverManyOperations) {
    Rng rng(47);
    const TspInstance inst = oracle::random_instance(13, rng);
    Population pop(clustered_tours(inst, 10, rng));
    pop.track_pairwise(true);
    for (int step = 0; step < 10000; ++step) {
        const std::size_t i = uniform_below<std::size_t>(rng, pop.size());
        const Tour next = rng() % 3 ? two_opt_move(pop[i], inst, rng) : random_tour(inst, rng);
        switch (step % 3) {
            case 0:
                pop.replace(i, next);
                break;
            case 1:
                pop.insert(next);
                pop.remove(uniform_below<std::size_t>(rng, pop.size()));
                break;
            default: {
                pop.insert(next);
                const std::vector<std::size_t> prot{pop.best_index()};
                remove_worst_for_entropy(pop, prot);
            }
        }
        ASSERT_EQ(pop.size(), 10u);
        if (step % 250 == 0) {
            const auto orders = oracle::orders(pop.tours());
            ASSERT_NEAR(pop.entropy(), oracle::entropy(orders, pop.total_directed()), 1e-9);
            for (std::size_t a = 0; a < pop.size(); ++a) {
                for (std::size_t b = 0; b < pop.size(); ++b) {
                    ASSERT_EQ(pop.pairwise(a, b), static_cast<int>(oracle::difference(orders[a], orders[b])));
                }
            }
        }
    }
    // Bit-identical to a population rebuilt from the same tours.
    const Population fresh(std::vector<Tour>(pop.tours().begin(), pop.tours().end()));
    EXPECT_EQ(pop.entropy(), fresh.entropy());
    EXPECT_NEAR(pop.entropy(), entropy_of(pop.freq(), pop.total_directed()), 1e-12);
    EXPECT_EQ(pop.freq().total(), 13 * 10);
}

TEST(Diversity, FrequencyTableRejectsNegativeCounts) {
    EdgeFrequencyTable t(5);
    t.add(1, 3, 2);
    EXPECT_EQ(t.count(3, 1), 2);
    t.add(3, 1, -2);
    EXPECT_EQ(t.count(1, 3), 0);
    EXPECT_EQ(t.unique_edges(), 0u);
    EXPECT_THROW(t.add(1, 3, -1), std::logic_error);
}

TEST(Diversity, DeltaHMatchesDifferenceOfContributions) {
    for (int f = 0; f < 30; ++f) {
        for (const int c : {-1, 1, 2}) {
            if (f + c < 0) continue;
            const double T = 200.0;
            const double expect = 2 * (directed_contribution(f + c, T) - directed_contribution(f, T));
            EXPECT_NEAR(delta_h(f, c, T), expect, 1e-15);
        }
    }
}

TEST(Diversity, EliteIsLowestCostPrefix) {
    Rng rng(53);
    const TspInstance inst = oracle::random_instance(20, rng);
    const Population pop(random_tours(inst, 25, rng));
    const auto e = pop.elite(10.0);
    ASSERT_EQ(e.size(), 3u);  // ceil(2.5)
    std::vector<std::size_t> idx(25);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pop.cost(a) < pop.cost(b); });
    std::vector<std::size_t> expect(idx.begin(), idx.begin() + 3);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(e, expect);
    EXPECT_EQ(pop.cost(pop.best_index()), pop.cost(idx[0]));
}

TEST(Kernels, PairwiseDifferencesMatchReference) {
    Rng rng(59);
    const TspInstance inst = oracle::random_instance(300, rng);
    const auto tours = clustered_tours(inst, 40, rng);
    EXPECT_EQ(pairwise_differences(tours), reference::pairwise_differences(tours));
}

TEST(Kernels, RemovalDeltasMatchReference) {
    Rng rng(61);
    const TspInstance inst = oracle::random_instance(400, rng);
    const Population pop(clustered_tours(inst, 30, rng));
    const auto a = pop.removal_deltas();
    const auto b = reference::removal_deltas(pop);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}
