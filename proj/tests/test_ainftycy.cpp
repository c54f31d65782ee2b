#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support/fixtures.hpp"

using namespace octcft;
using namespace fixtures;

namespace {

// Triples (a, b, c) of basis letters of a one-object algebra on which
// (ab)c != a(bc), read straight off the stored m_2 table.
std::size_t nonassociative_triples(const AInftyCategory& c) {
  const std::size_t n = c.hom(0, 0).dim();
  auto prod = [&](const SparseVector& x, const SparseVector& y) {
    SparseVector out;
    for (const auto& [i, a] : x)
      for (const auto& [j, b] : y) axpy(out, a * b, c.mult({L(0, 0, i), L(0, 0, j)}));
    return out;
  };
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        SparseVector a{{i, Rational(1)}}, b{{j, Rational(1)}}, cc{{k, Rational(1)}};
        if (prod(prod(a, b), cc) != prod(a, prod(b, cc))) ++bad;
      }
  return bad;
}

Rational det(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  Rational sum;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_zero()) continue;
    std::vector<std::vector<Rational>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Rational> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    sum += sign_of(static_cast<long>(j)) * a[0][j] * det(minor);
  }
  return sum;
}

DgCategorySpec to_dg_spec(const AInftyCategory& c) {
  DgCategorySpec s;
  s.objects = c.objects();
  for (ObjectId a = 0; a < c.object_count(); ++a) {
    for (ObjectId b = 0; b < c.object_count(); ++b) s.homs[{a, b}] = c.hom(a, b).basis;
    if (c.has_unit(a)) s.units[a] = c.unit(a);
  }
  for (const auto& [w, v] : c.table(1))
    for (const auto& [i, x] : v) s.differential.push_back({w, i, x});
  for (const auto& [w, v] : c.table(2))
    for (const auto& [i, x] : v) s.composition.push_back({w, i, x});
  return s;
}

HomElement basis(ObjectId a, ObjectId b, std::size_t i) { return {a, b, {{i, Rational(1)}}}; }

}  // namespace

TEST_CASE("ground field satisfies every axiom") {
  auto k = ground_field();
  CHECK(check_ainfty_relations(k, 6).ok);
  CHECK(check_units(k).ok);
}

TEST_CASE("matrix algebra is an A-infinity category with m_n = 0 for n != 2") {
  auto m = matrix_algebra(2);
  CHECK(nonassociative_triples(m) == 0);
  CHECK(check_ainfty_relations(m, 6).ok);
  CHECK(check_units(m).ok);
}

TEST_CASE("a corrupted structure constant is caught at arity 3 only") {
  auto good = truncated_poly(3);
  CHECK(check_ainfty_relations(good, 6).ok);
  auto bad = truncated_poly(3);
  bad.add_mult({L(0, 0, 0), L(0, 0, 1)}, 2, 1);  // 1 * x = x + x^2
  const std::size_t expected = nonassociative_triples(bad);
  REQUIRE(expected > 0);
  CHECK(check_ainfty_relations(bad, 2).ok);
  auto rep = check_ainfty_relations(bad, 3);
  CHECK_FALSE(rep.ok);
  CHECK(rep.violation_count == expected);
  CHECK(rep.details.front().rfind("arity 3", 0) == 0);
}

TEST_CASE("unit axioms") {
  auto dual = truncated_poly(2);
  CHECK(check_units(dual).ok);
  dual.set_unit(0, {{0, Rational(2)}});
  auto rep = check_units(dual);
  CHECK_FALSE(rep.ok);
  CHECK(rep.details.front().find("m_2") != std::string::npos);

  auto shifted = truncated_poly(2, 1);  // not a valid graded model, only the unit matters
  shifted.set_unit(0, {{1, Rational(1)}});
  CHECK_FALSE(check_units(shifted).ok);
}

TEST_CASE("higher operations must vanish on units") {
  AInftyCategory h({"A"});
  h.set_hom(0, 0, {{"1", 0}, {"y", -1}});
  h.set_unit(0, {{0, Rational(1)}});
  h.add_mult({L(0, 0, 0), L(0, 0, 0)}, 0, 1);
  h.add_mult({L(0, 0, 0), L(0, 0, 1)}, 1, 1);
  h.add_mult({L(0, 0, 1), L(0, 0, 0)}, 1, 1);
  CHECK(check_units(h).ok);
  h.add_mult({L(0, 0, 0), L(0, 0, 1), L(0, 0, 1)}, 1, 1);  // m_3(1, y, y) = y
  auto rep = check_units(h);
  CHECK_FALSE(rep.ok);
  CHECK(rep.details.front().find("m_3") != std::string::npos);
}

TEST_CASE("arity bounds and degree homogeneity are enforced") {
  auto m = matrix_algebra(1);
  CHECK_THROWS_AS(check_ainfty_relations(m, 7), ArityTooLarge);
  std::vector<Letter> seven(7, L(0, 0, 0));
  CHECK_THROWS_AS(m.add_mult(seven, 0, 1), ArityTooLarge);
  auto s = sphere();
  CHECK_THROWS_AS(s.add_mult({L(0, 0, 0), L(0, 0, 0)}, 1, 1), InvalidStructure);
}

TEST_CASE("S^2 cohomology with Poincare pairing is cyclic") {
  auto s = std::make_shared<const AInftyCategory>(sphere());
  CYStructure cy(s, 2);
  cy.set_pairing(0, 0, 0, 1, 1);
  cy.set_pairing(0, 0, 1, 0, 1);
  CHECK(check_nondegenerate(cy).ok);
  CHECK(check_cyclic(cy, 6).ok);
  // by hand: <ab, c> = 1 iff exactly one of a, b, c is x, which is invariant
  // under rotation
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c) {
        const Rational lhs = cy.pair(s->mult({basis(0, 0, a), basis(0, 0, b)}), basis(0, 0, c));
        CHECK(lhs == Rational(a + b + c == 1 ? 1 : 0));
      }
}

TEST_CASE("matrix trace pairing is nondegenerate and cyclic") {
  auto m = std::make_shared<const AInftyCategory>(matrix_algebra(2));
  auto cy = matrix_trace_pairing(m, 2);
  std::vector<std::vector<Rational>> dense(4, std::vector<Rational>(4));
  for (const auto& t : cy.pairing_matrix(0, 0).triplets()) dense[t.row][t.col] = t.value;
  CHECK_FALSE(det(dense).is_zero());
  CHECK(check_nondegenerate(cy).ok);
  CHECK(check_cyclic(cy, 6).ok);
}

TEST_CASE("tr(A)tr(B) is degenerate") {
  auto m = std::make_shared<const AInftyCategory>(matrix_algebra(2));
  CYStructure cy(m, 0);
  for (std::size_t i : {0u, 3u})
    for (std::size_t j : {0u, 3u}) cy.set_pairing(0, 0, i, j, 1);
  auto rep = check_nondegenerate(cy);
  CHECK_FALSE(rep.ok);
  CHECK(rep.details.front().find("rank 1") != std::string::npos);
  CHECK_THROWS_AS(check_cyclic(cy, 3), DegeneratePairing);
}

TEST_CASE("zero pairing fails in every degree") {
  auto s = std::make_shared<const AInftyCategory>(sphere());
  CYStructure cy(s, 2);
  auto rep = check_nondegenerate(cy);
  CHECK_FALSE(rep.ok);
  CHECK(rep.violation_count == 2);  // degrees 0 and -2
}

TEST_CASE("from_dg_category examples") {
  auto q = from_dg_category(to_dg_spec(arrow_quiver()));
  CHECK(q.object_count() == 2);
  CHECK(check_ainfty_relations(q, 6).ok);
  CHECK(check_units(q).ok);
  CHECK_NOTHROW(from_dg_category(to_dg_spec(matrix_algebra(2))));

  // a * a = b, b * a = b, a * b = a on a two-element magma
  DgCategorySpec magma;
  magma.objects = {"X"};
  magma.homs[{0, 0}] = {{"a", 0}, {"b", 0}};
  magma.composition = {{{L(0, 0, 0), L(0, 0, 0)}, 1, 1},
                       {{L(0, 0, 1), L(0, 0, 0)}, 1, 1},
                       {{L(0, 0, 0), L(0, 0, 1)}, 0, 1}};
  CHECK_THROWS_AS(from_dg_category(magma), NotAssociative);
}

TEST_CASE("from_dg_category rejects a broken Leibniz rule") {
  SmallComplex v{{1, 0}, {{0, 0}, {1, 0}}};  // d e0 = e1
  auto spec = to_dg_spec(endomorphism_category({v}));
  CHECK_NOTHROW(from_dg_category(spec));
  // m_1(E00) gains a spurious E10 term
  spec.differential.push_back({{L(0, 0, 0)}, 2, 1});
  CHECK_THROWS_AS(from_dg_category(spec), LeibnizFailure);
}

TEST_CASE("random dg endomorphism categories satisfy the axioms and supertrace cyclicity") {
  std::mt19937 rng(41);
  for (int t = 0; t < 60; ++t) {
    std::vector<SmallComplex> vs;
    const int objs = std::uniform_int_distribution<int>(1, 2)(rng);
    for (int a = 0; a < objs; ++a) vs.push_back(random_complex(rng, 3));
    auto raw = endomorphism_category(vs);
    auto cat = std::make_shared<const AInftyCategory>(from_dg_category(to_dg_spec(raw)));
    CHECK(check_ainfty_relations(*cat, 4).ok);
    CHECK(check_units(*cat).ok);
    auto cy = supertrace_pairing(cat, vs);
    CHECK(check_nondegenerate(cy).ok);
    CHECK(check_cyclic(cy, 2).ok);

    // trace tr(f) = <f, 1> is graded cyclic
    for (ObjectId a = 0; a < cat->object_count(); ++a)
      for (ObjectId b = 0; b < cat->object_count(); ++b)
        for (std::size_t i = 0; i < cat->hom(a, b).dim(); ++i)
          for (std::size_t j = 0; j < cat->hom(b, a).dim(); ++j) {
            HomElement f = basis(a, b, i), g = basis(b, a, j);
            const Rational fg = cy.pair(cat->mult({f, g}), {a, a, cat->unit(a)});
            const Rational gf = cy.pair(cat->mult({g, f}), {b, b, cat->unit(b)});
            const long s = static_cast<long>(cat->degree(L(a, b, i))) * cat->degree(L(b, a, j));
            CHECK(fg == sign_of(s) * gf);
          }
  }
}

TEST_CASE("unit-adapted basis is an isomorphic category") {
  auto m = std::make_shared<const AInftyCategory>(matrix_algebra(3));
  REQUIRE_FALSE(m->unit_index(0).has_value());
  auto adapted = std::make_shared<const AInftyCategory>(m->with_unit_basis());
  REQUIRE(adapted->unit_index(0).has_value());
  CHECK(adapted->hom(0, 0).basis[*adapted->unit_index(0)].name == "1_M");
  CHECK(check_ainfty_relations(*adapted, 3).ok);
  CHECK(check_units(*adapted).ok);
  // rebase the trace pairing with the same change of basis
  SparseMatrix t = SparseMatrix::identity(9);
  t.set(0, 0, 1);
  t.set(4, 0, 1);
  t.set(8, 0, 1);
  auto cy = matrix_trace_pairing(m, 3).rebased(adapted, {{{0, 0}, t}});
  CHECK(check_cyclic(cy, 3).ok);
  CHECK(cy.pair({0, 0, adapted->unit(0)}, {0, 0, adapted->unit(0)}) == Rational(3));
}
