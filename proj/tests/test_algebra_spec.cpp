#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "octcft/algebra_spec.hpp"
#include "support/fixtures.hpp"

using namespace octcft;

namespace {

const char* kDual = R"({
  "name": "dual",
  "objects": ["A"],
  "homs": [{"source": "A", "target": "A", "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 0}]}],
  "m2": [
    {"inputs": ["1", "1"], "output": "1", "coeff": "1"},
    {"inputs": ["1", "x"], "output": "x", "coeff": "1"},
    {"inputs": ["x", "1"], "output": "x", "coeff": "1"}
  ],
  "units": {"A": "1"},
  "pairing": [{"left": "1", "right": "x", "value": "1"}, {"left": "x", "right": "1", "value": "1"}],
  "dimension": 0
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  return s.replace(p, from.size(), to);
}

template <class F>
ParseError parse_error_of(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError");
  return ParseError("", 0, 0);
}

// Random documents: objects, graded homs and degree-correct constants.
AlgebraSpec random_spec(std::mt19937& rng) {
  std::uniform_int_distribution<int> nobj(1, 3), dim(0, 2), deg(-2, 2), coef(-5, 5), den(1, 4);
  AlgebraSpec s;
  s.name = "random";
  const int n = nobj(rng);
  for (int a = 0; a < n; ++a) s.objects.push_back("O" + std::to_string(a));
  int counter = 0;
  for (ObjectId a = 0; a < s.objects.size(); ++a)
    for (ObjectId b = 0; b < s.objects.size(); ++b) {
      auto& basis = s.homs[{a, b}];
      const int k = dim(rng);
      for (int i = 0; i < k; ++i) basis.push_back({"e" + std::to_string(counter++), deg(rng)});
    }
  std::vector<Letter> letters;
  for (const auto& [st, basis] : s.homs)
    for (std::size_t i = 0; i < basis.size(); ++i) letters.push_back({st.first, st.second, i});
  auto degree = [&](const Letter& l) { return s.homs.at({l.source, l.target}).at(l.index).degree; };
  for (int arity = 1; arity <= 3; ++arity)
    for (int trial = 0; trial < 6 && !letters.empty(); ++trial) {
      std::vector<Letter> in{letters[rng() % letters.size()]};
      while (static_cast<int>(in.size()) < arity) {
        std::vector<Letter> next;
        for (const auto& l : letters)
          if (l.source == in.back().target) next.push_back(l);
        if (next.empty()) break;
        in.push_back(next[rng() % next.size()]);
      }
      if (static_cast<int>(in.size()) != arity) continue;
      int want = arity - 2;
      for (const auto& l : in) want += degree(l);
      const auto& out = s.homs.at({in.front().source, in.back().target});
      for (std::size_t o = 0; o < out.size(); ++o)
        if (out[o].degree == want) {
          const int c = coef(rng);
          if (c != 0) s.mults.push_back({in, o, Rational(c, den(rng))});
          break;
        }
    }
  for (ObjectId a = 0; a < s.objects.size(); ++a)
    if (!s.homs.at({a, a}).empty() && rng() % 2) s.units[a] = {{0, Rational(1)}};
  return s;
}

}  // namespace

TEST_CASE("a document parses into the expected structure") {
  auto s = parse_algebra_spec(kDual);
  CHECK(s.name == "dual");
  CHECK(s.objects == std::vector<std::string>{"A"});
  CHECK(s.homs.at({0, 0}).size() == 2);
  CHECK(s.mults.size() == 3);
  CHECK(s.pairing.size() == 2);
  CHECK(s.dimension == 0);
  CHECK(s.max_arity == kDefaultMaxArity);
  auto cat = std::make_shared<const AInftyCategory>(build_category(s));
  CHECK(check_ainfty_relations(*cat, 4).ok);
  CHECK(check_units(*cat).ok);
  auto cy = build_cy(s, cat);
  REQUIRE(cy.has_value());
  CHECK(check_nondegenerate(*cy).ok);
  CHECK(check_cyclic(*cy, 3).ok);
}

TEST_CASE("malformed rationals carry a position") {
  const std::string doc = replace(kDual, R"("output": "x", "coeff": "1"},
    {"inputs": ["x", "1"])", R"("output": "x", "coeff": "1/0"},
    {"inputs": ["x", "1"])");
  auto e = parse_error_of([&] { parse_algebra_spec(doc); });
  CHECK(e.line == 7);
  CHECK(e.column == 52);
  CHECK(std::string(e.what()).find("/m2/1/coeff") != std::string::npos);
  CHECK_THROWS_AS(parse_algebra_spec(replace(kDual, R"("value": "1"})", R"("value": "x"})")), ParseError);
}

TEST_CASE("syntax and type errors carry positions") {
  auto e = parse_error_of([] { parse_algebra_spec("{\n  \"objects\": [\"A\",]\n}"); });
  CHECK(e.line == 2);
  auto deg = parse_error_of([&] { parse_algebra_spec(replace(kDual, R"("degree": 0}, {"name": "x")", R"("degree": 0.5}, {"name": "x")")); });
  CHECK(deg.line == 4);
  CHECK(std::string(deg.what()).find("/homs/0/basis/0/degree") != std::string::npos);
  CHECK_THROWS_AS(parse_algebra_spec(replace(kDual, R"("name": "dual")", R"("name": "dual", "colour": 1)")), ParseError);
  CHECK_THROWS_AS(parse_algebra_spec("[]"), ParseError);
  CHECK_THROWS_AS(parse_algebra_spec(R"({"name": "no objects"})"), ParseError);
  CHECK_THROWS_AS(parse_algebra_spec(replace(kDual, R"("dimension": 0)", R"("maxArity": 0)")), ParseError);
}

TEST_CASE("arity and composability") {
  CHECK_THROWS_AS(parse_algebra_spec(replace(kDual, R"({"inputs": ["1", "1"], "output": "1")",
                                             R"({"inputs": ["1", "1", "1"], "output": "1")")),
                  ParseError);
  const char* two = R"({"objects": ["A", "B"],
    "homs": [{"source": "A", "target": "B", "basis": [{"name": "f", "degree": 0}]}],
    "m2": [{"inputs": ["f", "f"], "output": "f", "coeff": "1"}]})";
  CHECK_THROWS_AS(parse_algebra_spec(two), ParseError);
}

TEST_CASE("unresolved references name the reference") {
  try {
    parse_algebra_spec(replace(kDual, R"("units": {"A": "1"})", R"("units": {"A": "one"})"));
    FAIL("no ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(e.reference == "one");
  }
  try {
    parse_algebra_spec(replace(kDual, R"("units": {"A": "1"})", R"("units": {"Q": "1"})"));
    FAIL("no ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(e.reference == "Q");
  }
  // ambiguous bare name; the qualified form resolves it
  const char* amb = R"({"objects": ["A", "B"],
    "homs": [{"source": "A", "target": "A", "basis": [{"name": "1", "degree": 0}]},
             {"source": "B", "target": "B", "basis": [{"name": "1", "degree": 0}]}],
    "units": {"A": "1"}})";
  CHECK_THROWS_AS(parse_algebra_spec(amb), ResolutionError);
  auto ok = parse_algebra_spec(replace(amb, R"("units": {"A": "1"})", R"("units": {"A": "A>A:1", "B": "B>B:1"})"));
  CHECK(ok.units.size() == 2);
  CHECK(letter_ref(ok, Letter{1, 1, 0}) == "B>B:1");
}

TEST_CASE("wrong-degree constants are rejected when building") {
  // 1.1 = x with |x| = 1
  auto s = parse_algebra_spec(replace(replace(kDual, R"({"name": "x", "degree": 0})", R"({"name": "x", "degree": 1})"),
                                      R"(["1", "1"], "output": "1")", R"(["1", "1"], "output": "x")"));
  CHECK_THROWS_AS(build_category(s), InvalidStructure);
}

TEST_CASE("serialization round trip on random documents") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const AlgebraSpec s = random_spec(rng);
    const std::string text = serialize_algebra_spec(s);
    const AlgebraSpec back = parse_algebra_spec(text);
    CHECK(serialize_algebra_spec(back) == text);
    const auto a = build_category(s), b = build_category(back);
    for (int n = 1; n <= 3; ++n) CHECK(a.table(n) == b.table(n));
    for (ObjectId o = 0; o < s.objects.size(); ++o) {
      CHECK(a.has_unit(o) == b.has_unit(o));
      if (a.has_unit(o)) CHECK(a.unit(o) == b.unit(o));
    }
  }
}

TEST_CASE("input digest") {
  CHECK(input_digest("") == "cbf29ce484222325");
  CHECK(input_digest("a") == "af63dc4c8601ec8c");
  CHECK(input_digest(kDual) == input_digest(std::string(kDual)));
  CHECK(input_digest(kDual) != input_digest(std::string(kDual) + " "));
}
