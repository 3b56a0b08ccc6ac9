#include <gtest/gtest.h>

#include <random>

#include "crnkit/parser.hpp"
#include "fixtures.hpp"

using namespace crn;

namespace {
const ParseDiagnostic& only_error(const ParseResult& r) {
  const auto* d = r.first_error();
  if (!d) throw std::runtime_error("expected an error diagnostic");
  return *d;
}
}  // namespace

TEST(Parse, DiatomicWithoutHeader) {
  const auto r = parse_network("X1 -> 2 X2 @ 2.0\n2 X2 -> X1 @ 1.0");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.network, fixtures::diatomic(2.0, 1.0));
}

TEST(Parse, EmptyComplexIsZero) {
  const auto r = parse_network("0 -> A @ 3.0");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.network->num_transitions(), 1u);
  EXPECT_TRUE(r.network->transitions()[0].input.is_zero());
  EXPECT_EQ(r.network->transitions()[0].rate, 3.0);
}

TEST(Parse, NegativeRateIsRateErrorAtToken) {
  const auto r = parse_network("A -> B @ -1");
  EXPECT_FALSE(r.ok());
  const auto& d = only_error(r);
  EXPECT_EQ(d.code, "E_RATE");
  EXPECT_EQ(d.line, 1);
  EXPECT_EQ(d.column, 10);
}

TEST(Parse, RateErrors) {
  EXPECT_EQ(only_error(parse_network("A -> B @ 0")).code, "E_RATE");
  EXPECT_EQ(only_error(parse_network("A -> B @ abc")).code, "E_RATE");
  EXPECT_EQ(only_error(parse_network("A -> B @")).code, "E_RATE");
  EXPECT_EQ(only_error(parse_network("A -> B @ inf")).code, "E_RATE");
}

TEST(Parse, SyntaxErrorsCarryPositions) {
  const auto r = parse_network("species: A B\nA => B @ 1");
  const auto& d = only_error(r);
  EXPECT_EQ(d.code, "E_SYNTAX");
  EXPECT_EQ(d.line, 2);
  EXPECT_EQ(d.column, 3);
  EXPECT_EQ(only_error(parse_network("A -> B")).code, "E_SYNTAX");
  EXPECT_EQ(only_error(parse_network("A + -> B @ 1")).code, "E_SYNTAX");
  EXPECT_EQ(only_error(parse_network("0 A -> B @ 1")).code, "E_SYNTAX");
  EXPECT_EQ(only_error(parse_network("A -> B @ 1 extra")).code, "E_SYNTAX");
  EXPECT_EQ(only_error(parse_network("0 + A -> B @ 1")).code, "E_SYNTAX");
}

TEST(Parse, ReversibleArrowNeedsTwoRates) {
  EXPECT_EQ(only_error(parse_network("A <-> B @ 1")).code, "E_SYNTAX");
  EXPECT_EQ(only_error(parse_network("A -> B @ 1, 2")).code, "E_SYNTAX");
  const auto r = parse_network("A <-> 2 B @ 1.5, 0.25");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.network->num_transitions(), 2u);
  EXPECT_EQ(r.network->transitions()[1].input, (CountVector{0, 2}));
  EXPECT_EQ(r.network->transitions()[1].rate, 0.25);
}

TEST(Parse, UnknownSpeciesWithHeader) {
  const auto r = parse_network("species: A\nA -> B @ 1");
  const auto& d = only_error(r);
  EXPECT_EQ(d.code, "E_UNKNOWN_SPECIES");
  EXPECT_EQ(d.line, 2);
  EXPECT_EQ(d.column, 6);
}

TEST(Parse, HeaderFixesOrderAndAllowsUnusedSpecies) {
  const auto r = parse_network("species: B A Z\nA -> B @ 1 # trailing comment\n\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.network->species(), (std::vector<std::string>{"B", "A", "Z"}));
  EXPECT_EQ(r.network->transitions()[0].input, (CountVector{0, 1, 0}));
}

TEST(Parse, HeaderAfterReactionIsAnError) {
  EXPECT_EQ(only_error(parse_network("A -> B @ 1\nspecies: A B")).code, "E_SYNTAX");
}

TEST(Parse, RepeatedSpeciesInComplexAreSummed) {
  const auto a = parse_network("A + A -> B @ 1");
  const auto b = parse_network("2 A -> B @ 1");
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(*a.network, *b.network);
}

TEST(Parse, DuplicateLinesStayDistinct) {
  const auto r = parse_network("A -> B @ 1\nA -> B @ 1");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.network->num_transitions(), 2u);
}

TEST(Parse, EmptyInputIsWarningNotError) {
  const auto r = parse_network("# nothing here\n");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, "E_EMPTY");
  EXPECT_EQ(r.diagnostics[0].severity, Severity::Warning);
}

TEST(Parse, SelfLoopWarns) {
  const auto r = parse_network("A -> A @ 1");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, "W_SELF_LOOP");
}

TEST(Parse, ScientificRatesAndCompactCoefficients) {
  const auto r = parse_network("2X2 -> X1 @ 1.5e-3");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.network->transitions()[0].rate, 1.5e-3);
  EXPECT_EQ(r.network->transitions()[0].input, (CountVector{2, 0}));
}

TEST(Parse, OrThrowCarriesCode) {
  try {
    parse_network_or_throw("A -> B @ -1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Rate);
  }
}

TEST(Format, BirthDeath) {
  EXPECT_EQ(format_network(fixtures::birth_death(1.0, 1.0)), "species: A\n0 -> A @ 1\nA -> 0 @ 1");
}

TEST(Format, ShortestRate) {
  const auto text = format_network(fixtures::diatomic(2.5, 1.0));
  EXPECT_NE(text.find("X1 -> 2 X2 @ 2.5"), std::string::npos);
  EXPECT_EQ(format_rate(0.1), "0.1");
  EXPECT_EQ(format_rate(1e-300), "1e-300");
}

TEST(Format, CatalystRoundTrip) {
  const auto net = fixtures::catalyst(1.0, 2.0, 0.5, 3.25);
  const auto r = parse_network(format_network(net));
  ASSERT_TRUE(r.ok());
  // Labels are not part of the text format.
  std::vector<Transition> unlabeled = net.transitions();
  for (auto& t : unlabeled) t.label.clear();
  EXPECT_EQ(*r.network, Network(net.species(), unlabeled));
}

TEST(FormatProperties, ParseIsTotalOnRandomBytes) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "AB0129 +-<>@,.e#\n_";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) text += alphabet[pick(rng)];
    const auto r = parse_network(text);
    if (!r.ok()) {
      ASSERT_NE(r.first_error(), nullptr) << text;
      EXPECT_GE(r.first_error()->line, 1);
      EXPECT_GE(r.first_error()->column, 1);
    }
  }
}
