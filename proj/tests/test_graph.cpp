#include "herdsim/graph.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace {

using herdsim::Edge;
using herdsim::GraphKind;
using herdsim::GraphModel;
using herdsim::WeightedGraph;
using testing::DoubleNear;
using testing::Pointwise;

// Directed 4-agent graph with two internally connected camps; stationary
// weights (3/14, 2/7, 2/7, 3/14).
WeightedGraph two_camp_graph() {
    const std::vector<double> w{
        0.0, 1.0, 0.0,  0.0,
        0.5, 0.0, 0.25, 0.25,
        0.25, 0.25, 0.0, 0.5,
        0.0, 0.0, 1.0,  0.0,
    };
    return WeightedGraph::from_dense(4, w);
}

// Undirected path 0-1-2 with uniform weights.
WeightedGraph path3() {
    const std::vector<std::pair<int, int>> pairs{{0, 1}, {1, 2}};
    return WeightedGraph::undirected_uniform(3, pairs);
}

double fold_row(const WeightedGraph& g, int i) {
    double s = 0.0;
    for (const auto& e : g.row(i)) s += e.weight;
    return s;
}

TEST(Build, RenormalizesRows) {
    const std::vector<Edge> edges{{0, 0, 2.0}, {0, 1, 1.0}, {0, 2, 1.0}, {1, 0, 5.0},
                                  {2, 1, 3.0}};
    const auto g = WeightedGraph::from_edges(3, edges);
    EXPECT_DOUBLE_EQ(g.weight(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(g.weight(0, 1), 0.25);
    EXPECT_DOUBLE_EQ(g.weight(0, 2), 0.25);
    EXPECT_DOUBLE_EQ(g.weight(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(2, 1), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(2, 0), 0.0);
    EXPECT_DOUBLE_EQ(g.max_normalization_deviation(), 4.0);
}

TEST(Build, AccumulatesDuplicateEdges) {
    const std::vector<Edge> edges{{0, 1, 1.0}, {0, 1, 1.0}, {0, 2, 2.0}, {1, 0, 1.0},
                                  {2, 0, 1.0}};
    const auto g = WeightedGraph::from_edges(3, edges);
    EXPECT_DOUBLE_EQ(g.weight(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(g.weight(0, 2), 0.5);
}

TEST(Build, DropsZeroWeightEdges) {
    const std::vector<Edge> edges{{0, 1, 0.0}, {0, 2, 1.0}, {1, 0, 1.0}, {2, 0, 1.0}};
    const auto g = WeightedGraph::from_edges(3, edges);
    EXPECT_EQ(g.row(0).size(), 1u);
    EXPECT_DOUBLE_EQ(g.weight(0, 2), 1.0);
}

TEST(Build, RejectsBadInput) {
    const std::vector<Edge> none{};
    EXPECT_THROW(WeightedGraph::from_edges(0, none), herdsim::ValidationError);
    EXPECT_THROW(WeightedGraph::from_edges(2, none), herdsim::EmptyRowError);

    const std::vector<Edge> zero_row{{0, 1, 0.0}, {1, 0, 1.0}};
    EXPECT_THROW(WeightedGraph::from_edges(2, zero_row), herdsim::EmptyRowError);

    const std::vector<Edge> neg{{0, 1, -0.5}, {1, 0, 1.0}};
    EXPECT_THROW(WeightedGraph::from_edges(2, neg), herdsim::NegativeWeightError);

    const std::vector<Edge> oor{{0, 2, 1.0}, {1, 0, 1.0}};
    EXPECT_THROW(WeightedGraph::from_edges(2, oor), herdsim::IndexOutOfRangeError);

    const std::vector<double> short_dense{1.0, 2.0};
    EXPECT_THROW(WeightedGraph::from_dense(2, short_dense),
                 herdsim::DimensionMismatchError);
}

TEST(Build, UndirectedUniformWeightsAreInverseDegree) {
    const auto g = path3();
    EXPECT_EQ(g.kind(), GraphKind::UndirectedUniform);
    EXPECT_DOUBLE_EQ(g.weight(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(g.weight(1, 2), 0.5);
    EXPECT_DOUBLE_EQ(g.weight(2, 1), 1.0);
}

TEST(Build, UndirectedRejectsIsolatedNode) {
    const std::vector<std::pair<int, int>> pairs{{0, 1}};
    EXPECT_THROW(WeightedGraph::undirected_uniform(3, pairs), herdsim::EmptyRowError);
}

TEST(Build, RowSumsFoldToExactlyOne) {
    herdsim::Stream rng(314159);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(12));
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i) {
            const int deg = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            for (int d = 0; d < deg; ++d) {
                const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                const double scale = std::ldexp(1.0, static_cast<int>(rng.below(27)) - 20);
                edges.push_back({i, j, rng.uniform() * scale + 1e-9});
            }
        }
        const auto g = WeightedGraph::from_edges(n, edges);
        for (int i = 0; i < n; ++i) {
            ASSERT_EQ(fold_row(g, i), 1.0) << "trial " << trial << " row " << i;
            for (const auto& e : g.row(i)) ASSERT_GT(e.weight, 0.0);
        }
    }
}

TEST(Build, ExtremeWeightRatiosStayNearOne) {
    // ratios around 1e15 exceed what the exact fixup can absorb; the row sum
    // must still be far inside the 1e-12 contract
    const std::vector<Edge> edges{{0, 0, 1e-15}, {0, 1, 1.0}, {0, 2, 0.5},
                                  {1, 0, 1.0},  {2, 0, 1.0}};
    const auto g = WeightedGraph::from_edges(3, edges);
    EXPECT_NEAR(fold_row(g, 0), 1.0, 1e-13);
}

TEST(Build, AllOnesMatvecIsExactlyOnes) {
    const auto g = two_camp_graph();
    const std::vector<double> ones(4, 1.0);
    const auto out = g.multiply(ones);
    for (double v : out) EXPECT_EQ(v, 1.0);
}

TEST(Matvec, MatchesHandComputation) {
    const auto g = two_camp_graph();
    const std::vector<double> x{1.0, 0.0, 0.0, 1.0};
    const auto y = g.multiply(x);
    EXPECT_THAT(y, Pointwise(DoubleNear(1e-15), {0.0, 0.75, 0.75, 0.0}));
}

TEST(Matvec, LeftMultiplyMatchesDense) {
    const auto g = two_camp_graph();
    const std::vector<double> v{0.1, 0.2, 0.3, 0.4};
    std::vector<double> out(4);
    g.multiply_left(v, out);
    const auto w = g.to_dense();
    for (int j = 0; j < 4; ++j) {
        double want = 0.0;
        for (int i = 0; i < 4; ++i) want += v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i) * 4 + j];
        EXPECT_NEAR(out[static_cast<std::size_t>(j)], want, 1e-15);
    }
}

TEST(Matvec, RejectsWrongLength) {
    const auto g = path3();
    const std::vector<double> bad{1.0, 2.0};
    EXPECT_THROW(g.multiply(bad), herdsim::DimensionMismatchError);
}

TEST(Dense, RoundTripsThroughFromDense) {
    const auto g = two_camp_graph();
    const auto w = g.to_dense();
    const auto h = WeightedGraph::from_dense(4, w);
    EXPECT_TRUE(g == h);
}

TEST(Dense, RefusesHugeGraphs) {
    const int n = WeightedGraph::kDenseLimit + 1;
    const auto g = herdsim::random_graph(n, GraphModel::ring(1), 1);
    EXPECT_THROW(g.to_dense(), herdsim::TooLargeError);
}

TEST(Irreducible, AcceptsStronglyConnected) {
    EXPECT_TRUE(herdsim::is_irreducible(two_camp_graph()));
    EXPECT_TRUE(herdsim::is_irreducible(path3()));
}

TEST(Irreducible, RejectsOneWayFlow) {
    const std::vector<Edge> edges{{0, 1, 1.0}, {1, 1, 1.0}};
    EXPECT_FALSE(herdsim::is_irreducible(WeightedGraph::from_edges(2, edges)));
}

// Exhaustive cross-check against transitive closure on all 3-node patterns.
TEST(Irreducible, MatchesWarshallClosureExhaustively) {
    for (int mask = 0; mask < 512; ++mask) {
        bool rows_ok = true;
        for (int i = 0; i < 3 && rows_ok; ++i)
            rows_ok = ((mask >> (3 * i)) & 7) != 0;
        if (!rows_ok) continue;

        std::vector<Edge> edges;
        bool reach[3][3] = {};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (mask & (1 << (3 * i + j))) {
                    edges.push_back({i, j, 1.0});
                    reach[i][j] = true;
                }
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
        bool strong = true;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j && !reach[i][j]) strong = false;

        const auto g = WeightedGraph::from_edges(3, edges);
        EXPECT_EQ(herdsim::is_irreducible(g), strong) << "mask " << mask;
    }
}

TEST(Stationary, TwoCampGraph) {
    const auto pi = herdsim::stationary_distribution(two_camp_graph());
    EXPECT_THAT(pi.pi, Pointwise(DoubleNear(1e-11),
                                 {3.0 / 14.0, 2.0 / 7.0, 2.0 / 7.0, 3.0 / 14.0}));
}

TEST(Stationary, PathThreeIsDegreeProportional) {
    const auto pi = herdsim::stationary_distribution(path3());
    EXPECT_THAT(pi.pi, Pointwise(DoubleNear(1e-11), {0.25, 0.5, 0.25}));
}

TEST(Stationary, PeriodicTwoCycleConverges) {
    const std::vector<Edge> edges{{0, 1, 1.0}, {1, 0, 1.0}};
    const auto g = WeightedGraph::from_edges(2, edges);
    const auto pi = herdsim::stationary_distribution(g);
    EXPECT_THAT(pi.pi, Pointwise(DoubleNear(1e-11), {0.5, 0.5}));
}

TEST(Stationary, LeftEigenvectorResidualIsTiny) {
    const auto g = herdsim::random_graph(20, GraphModel::erdos_renyi(0.3), 7);
    const auto pi = herdsim::stationary_distribution(g);
    std::vector<double> piw(20);
    g.multiply_left(pi.pi, piw);
    double sum = 0.0;
    for (int i = 0; i < 20; ++i) {
        EXPECT_GT(pi.pi[static_cast<std::size_t>(i)], 0.0);
        EXPECT_NEAR(piw[static_cast<std::size_t>(i)], pi.pi[static_cast<std::size_t>(i)], 1e-12);
        sum += pi.pi[static_cast<std::size_t>(i)];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Stationary, RequiresIrreducibility) {
    const std::vector<Edge> edges{{0, 0, 1.0}, {1, 0, 1.0}};
    const auto g = WeightedGraph::from_edges(2, edges);
    EXPECT_THROW(herdsim::stationary_distribution(g), herdsim::NotIrreducibleError);
}

TEST(Lazy, EntriesFollowDefinition) {
    const auto g = two_camp_graph();
    const auto wa = herdsim::lazy_matrix(g, 0.3);
    EXPECT_DOUBLE_EQ(wa.entry(0, 0), 0.7);
    EXPECT_DOUBLE_EQ(wa.entry(0, 1), 0.3);
    EXPECT_DOUBLE_EQ(wa.entry(1, 0), 0.15);
    EXPECT_DOUBLE_EQ(wa.entry(1, 1), 0.7);
    EXPECT_DOUBLE_EQ(wa.entry(1, 2), 0.075);
}

TEST(Lazy, AlphaZeroIsIdentityAlphaOneIsW) {
    const auto g = two_camp_graph();
    const std::vector<double> x{0.2, 0.4, 0.6, 0.8};
    const auto id = herdsim::lazy_matrix(g, 0.0).multiply(x);
    EXPECT_THAT(id, Pointwise(DoubleNear(0.0), x));
    const auto full = herdsim::lazy_matrix(g, 1.0).multiply(x);
    EXPECT_THAT(full, Pointwise(DoubleNear(1e-15), g.multiply(x)));
}

TEST(Lazy, RowsStaySubStochastic) {
    const auto g = two_camp_graph();
    const auto wa = herdsim::lazy_matrix(g, 0.3);
    const auto d = wa.to_dense();
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
            EXPECT_GE(d[static_cast<std::size_t>(i) * 4 + j], 0.0);
            s += d[static_cast<std::size_t>(i) * 4 + j];
        }
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
}

TEST(Lazy, SharesStationaryWithBase) {
    const auto g = two_camp_graph();
    const auto pi = herdsim::stationary_distribution(g);
    const auto wa = herdsim::lazy_matrix(g, 0.3).to_dense();
    for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
            s += pi.pi[static_cast<std::size_t>(i)] * wa[static_cast<std::size_t>(i) * 4 + j];
        EXPECT_NEAR(s, pi.pi[static_cast<std::size_t>(j)], 1e-11);
    }
}

TEST(Lazy, PerAgentAlpha) {
    const auto g = path3();
    const auto wa = herdsim::lazy_matrix(g, std::vector<double>{0.0, 0.5, 1.0});
    const std::vector<double> x{1.0, 0.0, 1.0};
    const auto y = wa.multiply(x);
    EXPECT_DOUBLE_EQ(y[0], 1.0);
    EXPECT_DOUBLE_EQ(y[1], 0.5);
    EXPECT_DOUBLE_EQ(y[2], 0.0);
}

TEST(Lazy, RejectsBadAlpha) {
    const auto g = path3();
    EXPECT_THROW(herdsim::lazy_matrix(g, -0.1), herdsim::AlphaOutOfRangeError);
    EXPECT_THROW(herdsim::lazy_matrix(g, 1.5), herdsim::AlphaOutOfRangeError);
    EXPECT_THROW(herdsim::lazy_matrix(g, std::vector<double>{0.1, 0.2}),
                 herdsim::DimensionMismatchError);
}

TEST(Trajectory, ZeroStepsReturnsStart) {
    const auto g = path3();
    const std::vector<double> x0{0.1, 0.9, 0.4};
    EXPECT_EQ(herdsim::expected_trajectory(g, 0.3, x0, 0), x0);
}

TEST(Trajectory, ConvergesToStationaryMixture) {
    const auto g = two_camp_graph();
    const std::vector<double> x0{1.0, 0.0, 0.0, 1.0};
    const auto pi = herdsim::stationary_distribution(g);
    double q0 = 0.0;
    for (int i = 0; i < 4; ++i) q0 += pi.pi[static_cast<std::size_t>(i)] * x0[static_cast<std::size_t>(i)];
    EXPECT_NEAR(q0, 3.0 / 7.0, 1e-11);
    const auto xt = herdsim::expected_trajectory(g, 0.3, x0, 400);
    for (double v : xt) EXPECT_NEAR(v, 3.0 / 7.0, 1e-9);
}

TEST(Trajectory, RejectsNegativeLength) {
    const auto g = path3();
    const std::vector<double> x0{0.0, 0.0, 0.0};
    EXPECT_THROW(herdsim::expected_trajectory(g, 0.3, x0, -1), herdsim::ValidationError);
}

TEST(RandomGraph, CompleteHasUniformWeights) {
    const auto g = herdsim::random_graph(4, GraphModel::complete(), 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_DOUBLE_EQ(g.weight(i, j), i == j ? 0.0 : 1.0 / 3.0);
}

TEST(RandomGraph, RingNeighbors) {
    const auto g = herdsim::random_graph(5, GraphModel::ring(1), 0);
    for (int i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(g.weight(i, (i + 1) % 5), 0.5);
        EXPECT_DOUBLE_EQ(g.weight(i, (i + 4) % 5), 0.5);
        EXPECT_DOUBLE_EQ(g.weight(i, i), 0.0);
    }
}

TEST(RandomGraph, RingRejectsOversizedK) {
    EXPECT_THROW(herdsim::random_graph(5, GraphModel::ring(3), 0),
                 herdsim::ValidationError);
    EXPECT_THROW(herdsim::random_graph(5, GraphModel::ring(0), 0),
                 herdsim::ValidationError);
}

TEST(RandomGraph, ErdosRenyiDeterministicPerSeed) {
    const auto a = herdsim::random_graph(12, GraphModel::erdos_renyi(0.4), 99);
    const auto b = herdsim::random_graph(12, GraphModel::erdos_renyi(0.4), 99);
    EXPECT_TRUE(a == b);
    const auto c = herdsim::random_graph(12, GraphModel::erdos_renyi(0.4), 100);
    EXPECT_FALSE(a == c);
}

TEST(RandomGraph, ErdosRenyiSamplesAreConnected) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = herdsim::random_graph(20, GraphModel::erdos_renyi(0.3), seed);
        EXPECT_TRUE(herdsim::is_irreducible(g)) << "seed " << seed;
    }
}

TEST(RandomGraph, ImpossibleConnectivityFails) {
    EXPECT_THROW(herdsim::random_graph(4, GraphModel::erdos_renyi(0.0), 5),
                 herdsim::ConnectivityFailureError);
}

TEST(RandomGraph, RejectsBadArguments) {
    EXPECT_THROW(herdsim::random_graph(1, GraphModel::complete(), 0),
                 herdsim::ValidationError);
    EXPECT_THROW(herdsim::random_graph(5, GraphModel::erdos_renyi(1.5), 0),
                 herdsim::ValidationError);
}

TEST(GraphIo, DirectedRoundTripIsExact) {
    const auto g = two_camp_graph();
    std::ostringstream out;
    herdsim::write_graph(g, out);
    std::istringstream in(out.str());
    const auto h = herdsim::read_graph(in);
    EXPECT_TRUE(g == h);
}

TEST(GraphIo, RandomDirectedRoundTripsBitExact) {
    herdsim::Stream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(8));
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i) {
            const int deg = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            for (int d = 0; d < deg; ++d)
                edges.push_back({i, static_cast<int>(rng.below(static_cast<std::uint64_t>(n))),
                                 rng.uniform() + 1e-9});
        }
        const auto g = WeightedGraph::from_edges(n, edges);
        std::ostringstream out;
        herdsim::write_graph(g, out);
        std::istringstream in(out.str());
        ASSERT_TRUE(g == herdsim::read_graph(in)) << "trial " << trial;
    }
}

TEST(GraphIo, UndirectedRoundTripRebuildsWeights) {
    const auto g = path3();
    std::ostringstream out;
    herdsim::write_graph(g, out);
    EXPECT_EQ(out.str(), "herdsim-graph v1 3 undirected\n0 1\n1 2\n");
    std::istringstream in(out.str());
    EXPECT_TRUE(g == herdsim::read_graph(in));
}

TEST(GraphIo, SkipsCommentsAndBlankLines) {
    std::istringstream in(
        "# a comment\n\nherdsim-graph v1 2 directed\n# another\n0 1 1\n\n1 0 1\n");
    const auto g = herdsim::read_graph(in);
    EXPECT_DOUBLE_EQ(g.weight(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(1, 0), 1.0);
}

TEST(GraphIo, RejectsMalformedInput) {
    std::istringstream bad_header("herdsim-graph v2 2 directed\n0 1 1\n1 0 1\n");
    EXPECT_THROW(herdsim::read_graph(bad_header), herdsim::ParseError);

    std::istringstream missing_weight("herdsim-graph v1 2 directed\n0 1\n1 0 1\n");
    EXPECT_THROW(herdsim::read_graph(missing_weight), herdsim::ParseError);

    std::istringstream stray_weight("herdsim-graph v1 2 undirected\n0 1 0.5\n");
    EXPECT_THROW(herdsim::read_graph(stray_weight), herdsim::ParseError);

    std::istringstream empty("");
    EXPECT_THROW(herdsim::read_graph(empty), herdsim::ParseError);

    std::istringstream bad_index("herdsim-graph v1 2 directed\n0 5 1\n1 0 1\n");
    EXPECT_THROW(herdsim::read_graph(bad_index), herdsim::IndexOutOfRangeError);
}

TEST(GraphIo, FileRoundTrip) {
    const auto g = two_camp_graph();
    const std::string path = testing::TempDir() + "herdsim_graph_roundtrip.txt";
    herdsim::write_graph(g, path);
    EXPECT_TRUE(g == herdsim::read_graph(path));
    EXPECT_THROW(herdsim::read_graph(path + ".missing"), herdsim::ParseError);
}

} // namespace
