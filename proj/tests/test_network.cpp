#include <gtest/gtest.h>

#include <random>

#include "crnkit/network.hpp"
#include "fixtures.hpp"

using namespace crn;

TEST(CountVector, RejectsNegativeEntries) {
  EXPECT_THROW(CountVector({1, -1}), Error);
  CountVector v(2);
  EXPECT_THROW(v.set(0, -3), Error);
}

TEST(Network, RejectsDuplicateSpeciesAndBadRates) {
  EXPECT_THROW(Network({"A", "A"}, {}), Error);
  EXPECT_THROW(Network({""}, {}), Error);
  EXPECT_THROW(Network({"A"}, {{{1}, {0}, 0.0, {}}}), Error);
  EXPECT_THROW(Network({"A"}, {{{1}, {0}, -2.0, {}}}), Error);
  EXPECT_THROW(Network({"A"}, {{{1, 0}, {0}, 1.0, {}}}), Error);
}

TEST(Network, SelfLoopIsAcceptedWithWarning) {
  Network net({"A"}, {{{1}, {1}, 1.0, {}}});
  EXPECT_EQ(net.warnings().size(), 1u);
  EXPECT_EQ(stoichiometric_matrix(net).column(0), std::vector<std::int64_t>{0});
}

TEST(Network, UnusedSpeciesAreRetained) {
  Network net({"A", "Z"}, {{{1, 0}, {0, 0}, 1.0, {}}});
  EXPECT_EQ(net.num_species(), 2u);
  EXPECT_EQ(complexes(net).size(), 2u);
}

TEST(Complexes, Diatomic) {
  const auto k = complexes(fixtures::diatomic());
  ASSERT_EQ(k.size(), 2u);
  EXPECT_EQ(k[0], (CountVector{0, 2}));
  EXPECT_EQ(k[1], (CountVector{1, 0}));
}

TEST(Complexes, EmptyNetwork) { EXPECT_TRUE(complexes(Network({"A"}, {})).empty()); }

TEST(Complexes, Catalyst) {
  const auto k = complexes(fixtures::catalyst());
  const std::vector<CountVector> expected{
      {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 1, 0, 0}, {0, 2, 1, 0}, {1, 0, 0, 0}, {1, 0, 1, 0},
  };
  EXPECT_EQ(k, expected);
}

TEST(ComplexGraph, DiatomicTwoCycle) {
  const auto g = complex_graph(fixtures::diatomic());
  ASSERT_EQ(g.vertices.size(), 2u);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].source, g.edges[1].target);
  EXPECT_EQ(g.edges[0].target, g.edges[1].source);
  EXPECT_EQ(g.edges[0].transition, 0u);
}

TEST(ComplexGraph, EmptyAndCatalyst) {
  const auto empty = complex_graph(Network{});
  EXPECT_TRUE(empty.vertices.empty());
  EXPECT_TRUE(empty.edges.empty());
  const auto g = complex_graph(fixtures::catalyst());
  EXPECT_EQ(g.vertices.size(), 6u);
  EXPECT_EQ(g.edges.size(), 4u);
}

TEST(StoichiometricMatrix, Diatomic) {
  const auto m = stoichiometric_matrix(fixtures::diatomic());
  EXPECT_EQ(m.column(0), (std::vector<std::int64_t>{-1, 2}));
  EXPECT_EQ(m.column(1), (std::vector<std::int64_t>{1, -2}));
}

TEST(StoichiometricMatrix, Catalyst) {
  const auto m = stoichiometric_matrix(fixtures::catalyst());
  ASSERT_EQ(m.rows, 4u);
  ASSERT_EQ(m.cols, 4u);
  EXPECT_EQ(m.column(0), (std::vector<std::int64_t>{1, 0, 0, 0}));
  EXPECT_EQ(m.column(1), (std::vector<std::int64_t>{0, -1, 0, 0}));
  EXPECT_EQ(m.column(2), (std::vector<std::int64_t>{-1, 0, -1, 1}));
  EXPECT_EQ(m.column(3), (std::vector<std::int64_t>{0, 2, 1, -1}));
}

TEST(PetriBipartite, CatalystDeltaToBHasMultiplicityTwo) {
  const auto p = to_petri_bipartite(fixtures::catalyst());
  bool found = false;
  for (const auto& e : p.edges)
    if (e.direction == PetriEdge::Direction::TransitionToSpecies && p.transitions[e.transition] == "delta" &&
        p.species[e.species] == "B") {
      EXPECT_EQ(e.multiplicity, 2);
      found = true;
    }
  EXPECT_TRUE(found);
  EXPECT_NE(p.edge_list().find("delta -> B x2"), std::string::npos);
}

TEST(PetriBipartite, EmptyAndBirthDeath) {
  EXPECT_TRUE(to_petri_bipartite(Network({"A"}, {})).edges.empty());
  const auto p = to_petri_bipartite(fixtures::birth_death());
  EXPECT_EQ(p.species.size(), 1u);
  EXPECT_EQ(p.transitions.size(), 2u);
  EXPECT_EQ(p.edges.size(), 2u);
}

namespace {
Network random_network(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ks(1, 4), ts(0, 5), coef(0, 2);
  std::uniform_real_distribution<double> rate(0.1, 5.0);
  const auto k = static_cast<std::size_t>(ks(rng));
  std::vector<std::string> species;
  for (std::size_t i = 0; i < k; ++i) species.push_back("S" + std::to_string(i));
  std::vector<Transition> transitions;
  const int nt = ts(rng);
  for (int j = 0; j < nt; ++j) {
    CountVector in(k), out(k);
    for (std::size_t i = 0; i < k; ++i) {
      in.set(i, coef(rng));
      out.set(i, coef(rng));
    }
    transitions.push_back({in, out, rate(rng), {}});
  }
  return Network(species, transitions);
}
}  // namespace

TEST(NetworkProperties, RandomNetworksSatisfyStructuralInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = random_network(rng);
    const auto m = stoichiometric_matrix(net);
    const auto k = complexes(net);
    const auto g = complex_graph(net);
    for (std::size_t j = 0; j < net.num_transitions(); ++j) {
      const auto& t = net.transitions()[j];
      EXPECT_EQ(m.column(j), difference(t.output, t.input));
      EXPECT_TRUE(std::binary_search(k.begin(), k.end(), t.input));
      EXPECT_TRUE(std::binary_search(k.begin(), k.end(), t.output));
      EXPECT_EQ(g.vertices[g.edges[j].source], t.input);
      EXPECT_EQ(g.vertices[g.edges[j].target], t.output);
    }
    for (const auto& c : k) {
      bool used = false;
      for (const auto& t : net.transitions()) used = used || t.input == c || t.output == c;
      EXPECT_TRUE(used);
    }
    EXPECT_EQ(g.edges.size(), net.num_transitions());
    EXPECT_EQ(g.vertices.size(), k.size());

    const auto [in, out] = petri_multiplicities(net);
    std::vector<double> rates;
    for (const auto& t : net.transitions()) rates.push_back(t.rate);
    EXPECT_EQ(from_petri_multiplicities(net.species(), in, out, rates), net);
  }
}
