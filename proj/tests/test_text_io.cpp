#include <catch2/catch_amalgamated.hpp>

#include "dmc/model.hpp"
#include "dmc/rng.hpp"
#include "dmc/text_io.hpp"
#include "dmc/validate.hpp"
#include "support/helpers.hpp"

using dmc::DuplicationForest;
using dmc::Error;
using dmc::ParseError;
using dmc::PpiGraph;
using dmc::make_graph;
using dmc::parse_forest;
using dmc::parse_graph;
using dmc::serialize_forest;
using dmc::serialize_graph;
using dmc::validate_pair;

TEST_CASE("graph text round trip") {
  const auto g = parse_graph("v A\nv B\ne A B\n");
  REQUIRE(g == make_graph({"A", "B"}, {{"A", "B"}}));
  REQUIRE(serialize_graph(g) == "v A\nv B\ne A B\n");
}

TEST_CASE("forest text round trip") {
  const auto f = parse_forest("n A -\nn B -\n");
  REQUIRE(f == DuplicationForest::singletons({"A", "B"}));
  REQUIRE(serialize_forest(f) == "n A -\nn B -\n");
}

TEST_CASE("comments and blank lines are ignored") {
  const auto g = parse_graph("# header\n\nv A # trailing\nv B\ne A B\n");
  REQUIRE(g.has_edge("A", "B"));
}

TEST_CASE("edge referencing an undeclared vertex is a line error") {
  try {
    parse_graph("e A B\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 1);
  }
}

TEST_CASE("duplicate edge lines are an error") {
  REQUIRE_THROWS_AS(parse_graph("v A\nv B\ne A B\ne B A\n"), ParseError);
}

TEST_CASE("malformed lines are errors") {
  REQUIRE_THROWS_AS(parse_graph("vertex A\n"), ParseError);
  REQUIRE_THROWS_AS(parse_graph("v\n"), ParseError);
  REQUIRE_THROWS_AS(parse_forest("n A\n"), ParseError);
  REQUIRE_THROWS_AS(parse_forest("n A - extra\n"), ParseError);
}

TEST_CASE("forest with a single-child node is rejected") {
  REQUIRE_THROWS_AS(parse_forest("n P -\nn A P\n"), ParseError);
}

TEST_CASE("forest with unknown parent is rejected") {
  REQUIRE_THROWS_AS(parse_forest("n A Q\n"), ParseError);
}

TEST_CASE("serialization is canonical on simulated instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [g, f] = testsupport::simulated_pair(dmc::DmcParams{0.7, 0.7}, 6, seed);
    REQUIRE(parse_graph(serialize_graph(g)) == g);
    REQUIRE(parse_forest(serialize_forest(f)) == f);
  }
}

TEST_CASE("validate_pair accepts the seed observation") {
  const auto g = make_graph({"A", "B"}, {{"A", "B"}});
  REQUIRE(validate_pair(g, DuplicationForest::singletons({"A", "B"})).ok());
}

TEST_CASE("validate_pair reports leaf mismatches") {
  const auto g = make_graph({"A", "B"}, {{"A", "B"}});
  const auto rep = validate_pair(g, DuplicationForest::singletons({"A", "Z"}));
  REQUIRE_FALSE(rep.ok());
  REQUIRE_THAT(rep.to_string(), Catch::Matchers::ContainsSubstring("leaves"));
}

TEST_CASE("validate_pair rejects three trees over a triangle") {
  const auto rep =
      validate_pair(testsupport::triangle_graph(), DuplicationForest::singletons({"A", "B", "C"}));
  REQUIRE_FALSE(rep.ok());
  REQUIRE_THAT(rep.to_string(), Catch::Matchers::ContainsSubstring("trees"));
}

TEST_CASE("validate_pair accepts simulated observations") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [g, f] = testsupport::simulated_pair(dmc::DmcParams{0.5, 0.5}, 8, seed);
    REQUIRE(validate_pair(g, f).ok());
  }
}
