#include <gtest/gtest.h>

#include <random>

#include "crnkit/rate.hpp"
#include "crnkit/structure.hpp"
#include "fixtures.hpp"

using namespace crn;

TEST(LinkageClasses, Diatomic) {
  const auto lc = linkage_classes(complex_graph(fixtures::diatomic()));
  ASSERT_EQ(lc.size(), 1u);
  EXPECT_EQ(lc[0], (std::vector<std::size_t>{0, 1}));
}

TEST(LinkageClasses, Catalyst) {
  const auto g = complex_graph(fixtures::catalyst());
  const auto lc = linkage_classes(g);
  ASSERT_EQ(lc.size(), 2u);
  auto names = [&](const std::vector<std::size_t>& cls) {
    std::vector<CountVector> out;
    for (auto v : cls) out.push_back(g.vertices[v]);
    return out;
  };
  // {∅, A, B} and {A+C, AC, 2B+C}
  EXPECT_EQ(names(lc[0]), (std::vector<CountVector>{{0, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}));
  EXPECT_EQ(names(lc[1]), (std::vector<CountVector>{{0, 0, 0, 1}, {0, 2, 1, 0}, {1, 0, 1, 0}}));
}

TEST(LinkageClasses, IsolatedVertices) {
  ComplexGraph g;
  g.vertices = {{0}, {1}, {2}};
  const auto lc = linkage_classes(g);
  EXPECT_EQ(lc.size(), 3u);
}

TEST(WeakReversibility, Fixtures) {
  EXPECT_TRUE(is_weakly_reversible(complex_graph(fixtures::diatomic())));
  EXPECT_FALSE(is_weakly_reversible(complex_graph(fixtures::catalyst())));
  EXPECT_TRUE(is_weakly_reversible(ComplexGraph{}));
  EXPECT_TRUE(is_weakly_reversible(complex_graph(fixtures::birth_death())));
}

TEST(WeakReversibility, ThreeCycleIsWeaklyReversibleButChainIsNot) {
  const Network cycle({"A", "B", "C"}, {{{1, 0, 0}, {0, 1, 0}, 1, {}},
                                        {{0, 1, 0}, {0, 0, 1}, 1, {}},
                                        {{0, 0, 1}, {1, 0, 0}, 1, {}}});
  EXPECT_TRUE(is_weakly_reversible(complex_graph(cycle)));
  const Network chain({"A", "B", "C"}, {{{1, 0, 0}, {0, 1, 0}, 1, {}}, {{0, 1, 0}, {0, 0, 1}, 1, {}}});
  EXPECT_FALSE(is_weakly_reversible(complex_graph(chain)));
}

TEST(Scc, MatchesBruteForceReachability) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    ComplexGraph g;
    for (std::size_t v = 0; v < n; ++v) g.vertices.push_back(CountVector{static_cast<std::int64_t>(v)});
    const std::size_t m = rng() % 12;
    for (std::size_t e = 0; e < m; ++e) g.edges.push_back({rng() % n, rng() % n, e});
    // Floyd–Warshall reachability
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t v = 0; v < n; ++v) reach[v][v] = true;
    for (const auto& e : g.edges) reach[e.source][e.target] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    const auto comp = strongly_connected_components(g);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(comp[i] == comp[j], reach[i][j] && reach[j][i]);
  }
}

TEST(Deficiency, Fixtures) {
  EXPECT_EQ(deficiency(fixtures::diatomic()), 0u);
  const auto r = analyze_structure(fixtures::catalyst());
  EXPECT_EQ(r.num_complexes, 6u);
  EXPECT_EQ(r.linkage_classes.size(), 2u);
  EXPECT_EQ(r.stoichiometric_rank, 3u);
  EXPECT_EQ(r.deficiency, 1u);
  EXPECT_EQ(deficiency(Network({"A"}, {})), 0u);
}

TEST(RationalRank, DependentColumns) {
  IntMatrix m(3, 3);
  // rows: (1,2,3), (2,4,6), (1,0,1)
  const std::int64_t vals[] = {1, 2, 3, 2, 4, 6, 1, 0, 1};
  std::copy(std::begin(vals), std::end(vals), m.data.begin());
  EXPECT_EQ(rational_rank(m), 2u);
}

TEST(ConservedQuantities, Fixtures) {
  EXPECT_EQ(conserved_quantities(fixtures::diatomic()), (std::vector<ConservedVector>{{{2, 1}}}));
  EXPECT_EQ(conserved_quantities(fixtures::catalyst()), (std::vector<ConservedVector>{{{0, 0, 1, 1}}}));
  EXPECT_TRUE(conserved_quantities(fixtures::birth_death()).empty());
}

TEST(ConservedQuantities, CanonicalFormNeedsGcdAndSign) {
  // 2A -> 3B : w = (3, 2)
  const Network net({"A", "B"}, {{{2, 0}, {0, 3}, 1.0, {}}});
  EXPECT_EQ(conserved_quantities(net), (std::vector<ConservedVector>{{{3, 2}}}));
  // No transitions: every unit vector is conserved.
  const auto basis = conserved_quantities(Network({"A", "B"}, {}));
  EXPECT_EQ(basis, (std::vector<ConservedVector>{{{0, 1}}, {{1, 0}}}));
}

TEST(StructureProperties, RandomNetworks) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 5;
    const std::size_t nt = rng() % 7;
    std::vector<std::string> species;
    for (std::size_t i = 0; i < k; ++i) species.push_back("S" + std::to_string(i));
    std::vector<Transition> ts;
    for (std::size_t j = 0; j < nt; ++j) {
      CountVector in(k), out(k);
      for (std::size_t i = 0; i < k; ++i) {
        in.set(i, coef(rng));
        out.set(i, coef(rng));
      }
      ts.push_back({in, out, 1.0, {}});
    }
    const Network net(species, ts);
    const auto r = analyze_structure(net);
    EXPECT_EQ(r.conserved_basis.size(), k - r.stoichiometric_rank);
    EXPECT_EQ(r.deficiency + r.linkage_classes.size() + r.stoichiometric_rank, r.num_complexes);
    for (const auto& w : r.conserved_basis) {
      EXPECT_TRUE(is_conserved(net, w));
      std::int64_t g = 0;
      for (auto x : w.weights) g = std::gcd(g, x);
      EXPECT_EQ(g, 1);
      const auto first = std::find_if(w.weights.begin(), w.weights.end(), [](auto x) { return x != 0; });
      ASSERT_NE(first, w.weights.end());
      EXPECT_GT(*first, 0);
    }
  }
}

TEST(ComplexBalance, DiatomicBalanced) {
  const auto rep = complex_balance(fixtures::diatomic(2, 1), std::vector<double>{0.5, 1.0}, 1e-12);
  EXPECT_TRUE(rep.balanced);
  for (const auto& e : rep.complexes) {
    EXPECT_DOUBLE_EQ(e.production, 1.0);
    EXPECT_DOUBLE_EQ(e.consumption, 1.0);
  }
}

TEST(ComplexBalance, BirthDeathBalanced) {
  EXPECT_TRUE(is_complex_balanced(fixtures::birth_death(3, 1), std::vector<double>{3.0}, 1e-12));
}

TEST(ComplexBalance, DiatomicUnbalancedResidual) {
  const auto net = fixtures::diatomic(2, 1);
  const auto rep = complex_balance(net, std::vector<double>{1.0, 1.0}, 1e-9);
  EXPECT_FALSE(rep.balanced);
  for (const auto& e : rep.complexes)
    if (e.complex == CountVector{1, 0}) EXPECT_DOUBLE_EQ(e.residual, -1.0);  // βc₂² − αc₁
}

TEST(ComplexBalance, ZeroStateAndDimensionError) {
  const auto net = fixtures::catalyst();
  const auto rep = complex_balance(net, std::vector<double>{0, 0, 0, 0}, 1e-9);
  EXPECT_FALSE(rep.balanced);  // ∅ → A fires at rate 1 from the empty state
  EXPECT_DOUBLE_EQ(rep.threshold, 1e-9 * 2.0);
  try {
    complex_balance(net, std::vector<double>{1.0}, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Dim);
  }
}

TEST(ComplexBalance, ImpliesRateEquilibriumOnRandomCycles) {
  // Build balanced states by construction: a cycle of complexes with equal flux.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  std::uniform_int_distribution<int> coef(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng() % 3;
    std::vector<double> c(k);
    for (auto& v : c) v = pos(rng);
    // Only 3^k distinct complexes exist with coefficients in {0,1,2}.
    const std::size_t len = std::min<std::size_t>(2 + rng() % 3, k == 1 ? 3 : 4);
    std::vector<CountVector> cycle;
    while (cycle.size() < len) {
      CountVector v(k);
      for (std::size_t i = 0; i < k; ++i) v.set(i, coef(rng));
      if (std::find(cycle.begin(), cycle.end(), v) == cycle.end()) cycle.push_back(v);
    }
    const double flux = pos(rng);
    std::vector<Transition> ts;
    for (std::size_t j = 0; j < len; ++j) {
      const auto& from = cycle[j];
      const double rate = flux / mass_action_monomial(c, from);
      ts.push_back({from, cycle[(j + 1) % len], rate, {}});
    }
    std::vector<std::string> species;
    for (std::size_t i = 0; i < k; ++i) species.push_back("S" + std::to_string(i));
    const Network net(species, ts);
    const auto rep = complex_balance(net, c, 1e-12);
    ASSERT_LE(rep.max_abs_residual, 1e-12);
    EXPECT_LE(inf_norm(rate_vector_field(net, c)), 1e-9);
  }
}
