#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "eaxedo/tour.hpp"
#include "oracles.hpp"

using namespace eaxedo;

TEST(Tour, CostAndNeighbours) {
    const TspInstance sq = oracle::unit_square();
    const Tour t({0, 1, 2, 3}, sq);
    EXPECT_EQ(t.cost(), 4);
    EXPECT_EQ(t.next(3), 0);
    EXPECT_EQ(t.prev(0), 3);
    EXPECT_TRUE(t.has_edge(0, 3));
    EXPECT_FALSE(t.has_edge(0, 2));
    EXPECT_EQ(t.edges().size(), 4u);
}

TEST(Tour, RejectsNonPermutations) {
    const TspInstance sq = oracle::unit_square();
    EXPECT_THROW(Tour({0, 1, 1, 3}, sq), std::invalid_argument);
    EXPECT_THROW(Tour({0, 1, 2}, sq), std::invalid_argument);
    EXPECT_THROW(Tour({0, 1, 2, 4}, sq), std::invalid_argument);
    const std::vector<NodeId> dup{0, 0, 1, 2};
    EXPECT_TRUE(validate(dup, 4).has_value());
    const std::vector<NodeId> ok{3, 1, 0, 2};
    EXPECT_FALSE(validate(ok, 4).has_value());
}

TEST(Tour, SameEdgesIgnoresRotationAndDirection) {
    const TspInstance sq = oracle::unit_square();
    const Tour a({0, 1, 2, 3}, sq);
    const Tour b({2, 1, 0, 3}, sq);
    const Tour c({0, 2, 1, 3}, sq);
    EXPECT_TRUE(same_edges(a, b));
    EXPECT_FALSE(same_edges(a, c));
}

TEST(TwoOpt, DeltaMatchesRecomputedCostOnSquare) {
    const TspInstance sq = oracle::unit_square();
    const Tour t({0, 1, 2, 3}, sq);
    // Only non-adjacent pairs in n = 4: (0,2) and (1,3).
    for (const TwoOptMove m : {TwoOptMove{0, 2}, TwoOptMove{1, 3}}) {
        ASSERT_TRUE(is_valid_move(m, 4));
        Tour u = t;
        const Weight d = two_opt_delta(t, sq, m);
        apply_two_opt(u, sq, m);
        EXPECT_EQ(u.cost(), t.cost() + d);
        EXPECT_EQ(u.cost(), tour_cost(sq, u));
        EXPECT_FALSE(validate(u, 4).has_value());
    }
    EXPECT_FALSE(is_valid_move({0, 1}, 4));
    EXPECT_FALSE(is_valid_move({0, 3}, 4));
}

TEST(TwoOpt, BruteForceAllMovesSmallInstance) {
    Rng rng(17);
    const TspInstance inst = oracle::random_instance(9, rng);
    const Tour t = random_tour(inst, rng);
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const TwoOptMove m{i, j};
            if (!is_valid_move(m, n)) continue;
            // Build the reconnection directly: reverse positions i+1..j.
            std::vector<NodeId> o(t.order().begin(), t.order().end());
            std::reverse(o.begin() + static_cast<long>(i) + 1, o.begin() + static_cast<long>(j) + 1);
            Tour u = t;
            apply_two_opt(u, inst, m);
            EXPECT_EQ(u.cost(), oracle::cost(inst, o));
            EXPECT_EQ(oracle::directed_edges(u.order()), oracle::directed_edges(o));
            EXPECT_EQ(two_opt_delta(t, inst, m), oracle::cost(inst, o) - t.cost());
        }
    }
}

TEST(TwoOpt, MoveIsAnInvolution) {
    Rng rng(23);
    const TspInstance inst = oracle::random_instance(30, rng);
    for (int k = 0; k < 500; ++k) {
        const Tour t = random_tour(inst, rng);
        const TwoOptMove m = random_two_opt_move(t.size(), rng);
        Tour u = t;
        apply_two_opt(u, inst, m);
        const NodeId a = t.at(m.i);
        const NodeId b = t.at(m.i + 1);
        const NodeId c = t.at(m.j);
        const NodeId d = t.at((m.j + 1) % t.size());
        ASSERT_TRUE(u.has_edge(a, c));
        ASSERT_TRUE(u.has_edge(b, d));
        // Position of the edge's first endpoint in order-array sequence.
        auto edge_pos = [&u](NodeId x, NodeId y) { return u.next(x) == y ? u.position(x) : u.position(y); };
        const std::size_t pi = edge_pos(a, c);
        const std::size_t pj = edge_pos(b, d);
        TwoOptMove back{std::min(pi, pj), std::max(pi, pj)};
        ASSERT_TRUE(is_valid_move(back, u.size()));
        apply_two_opt(u, inst, back);
        EXPECT_TRUE(same_edges(u, t));
        EXPECT_EQ(u.cost(), t.cost());
    }
}

TEST(TwoOpt, RandomMovesKeepTourValid) {
    Rng rng(29);
    const TspInstance inst = oracle::random_instance(40, rng);
    Tour t = random_tour(inst, rng);
    for (int k = 0; k < 10000; ++k) {
        const TwoOptMove m = random_two_opt_move(t.size(), rng);
        ASSERT_TRUE(is_valid_move(m, t.size()));
        const Weight before = t.cost();
        const Weight d = two_opt_delta(t, inst, m);
        apply_two_opt(t, inst, m);
        ASSERT_EQ(t.cost(), before + d);
        if (k % 97 == 0) {
            ASSERT_FALSE(validate(t, inst.size()).has_value());
            ASSERT_EQ(t.cost(), tour_cost(inst, t));
        }
    }
    EXPECT_FALSE(validate(t, inst.size()).has_value());
    EXPECT_EQ(t.cost(), tour_cost(inst, t));
}

TEST(TwoOpt, RandomMoveCoversAllPairs) {
    Rng rng(31);
    const std::size_t n = 7;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (int k = 0; k < 5000; ++k) {
        const auto m = random_two_opt_move(n, rng);
        ASSERT_TRUE(is_valid_move(m, n));
        seen.insert({m.i, m.j});
    }
    // n(n-3)/2 non-adjacent edge pairs.
    EXPECT_EQ(seen.size(), n * (n - 3) / 2);
}

TEST(TwoOpt, LocalSearchReachesLocalOptimum) {
    Rng rng(37);
    const TspInstance inst = oracle::random_instance(50, rng);
    Tour t = random_tour(inst, rng);
    const Weight start = t.cost();
    ASSERT_TRUE(two_opt_local_search(t, inst, 1000));
    EXPECT_LE(t.cost(), start);
    EXPECT_EQ(t.cost(), tour_cost(inst, t));
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            if (is_valid_move({i, j}, t.size())) ASSERT_GE(two_opt_delta(t, inst, {i, j}), 0);
        }
    }
}

TEST(TourIo, RoundTripWithFileIds) {
    const TspInstance inst("ids", {{0, 0}, {3, 0}, {3, 4}, {0, 4}, {1, 1}}, EdgeWeightKind::Euc2d,
                           {10, 20, 30, 40, 50});
    const Tour t({0, 4, 1, 2, 3}, inst);
    std::stringstream ss;
    write_tsplib_tour(ss, t, inst, "ids.tour");
    EXPECT_NE(ss.str().find("50"), std::string::npos);
    const Tour back = read_tsplib_tour(ss, inst);
    EXPECT_TRUE(same_edges(t, back));
    EXPECT_EQ(back.cost(), t.cost());
}

TEST(TourIo, MalformedTourRaises) {
    const TspInstance sq = oracle::unit_square();
    std::istringstream in("TYPE : TOUR\nDIMENSION : 4\nTOUR_SECTION\n1\n2\n2\n4\n-1\nEOF\n");
    try {
        read_tsplib_tour(in, sq);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::MalformedTour);
    }
}

TEST(TourIo, BundledOptimaMatchRecordedLength) {
    const TspInstance eil51 = load_tsplib(EAXEDO_DATA_DIR "/eil51.tsp");
    EXPECT_EQ(load_tsplib_tour(EAXEDO_DATA_DIR "/eil51.opt.tour", eil51).cost(), 426);
    const TspInstance a280 = load_tsplib(EAXEDO_DATA_DIR "/a280.tsp");
    EXPECT_EQ(load_tsplib_tour(EAXEDO_DATA_DIR "/a280.opt.tour", a280).cost(), 2579);
}
