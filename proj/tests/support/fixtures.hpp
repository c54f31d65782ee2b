#pragma once

// Small hand-built categories shared by the test binaries. Structure
// constants here are written out from their textbook definitions and do not
// go through any library code beyond the storage API.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "octcft/ainfty.hpp"

namespace fixtures {

using namespace octcft;

inline Letter L(ObjectId a, ObjectId b, std::size_t i) { return Letter{a, b, i}; }

/// One object, Hom = Q.1.
inline AInftyCategory ground_field() {
  AInftyCategory c({"pt"});
  c.set_hom(0, 0, {{"1", 0}});
  c.set_unit(0, {{0, Rational(1)}});
  c.add_mult({L(0, 0, 0), L(0, 0, 0)}, 0, 1);
  return c;
}

/// Q[x]/(x^k) with |x| = deg (deg must be even for a graded-commutative model).
inline AInftyCategory truncated_poly(int k, int deg = 0) {
  AInftyCategory c({"A"});
  std::vector<BasisElement> b;
  for (int i = 0; i < k; ++i) b.push_back({i == 0 ? "1" : "x^" + std::to_string(i), i * deg});
  c.set_hom(0, 0, b);
  c.set_unit(0, {{0, Rational(1)}});
  for (int i = 0; i < k; ++i)
    for (int j = 0; i + j < k; ++j) c.add_mult({L(0, 0, i), L(0, 0, j)}, i + j, 1);
  return c;
}

/// Cohomology of S^2 in homological grading: 1 in degree 0, x in degree -2.
inline AInftyCategory sphere() { return truncated_poly(2, -2); }

/// n x n matrices over Q; basis E_ij at index i*n + j, unit = sum E_ii.
inline AInftyCategory matrix_algebra(int n) {
  AInftyCategory c({"M"});
  std::vector<BasisElement> b;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.push_back({"E" + std::to_string(i + 1) + std::to_string(j + 1), 0});
  c.set_hom(0, 0, b);
  SparseVector u;
  for (int i = 0; i < n; ++i) u[i * n + i] = 1;
  c.set_unit(0, u);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) c.add_mult({L(0, 0, i * n + j), L(0, 0, j * n + l)}, i * n + l, 1);
  return c;
}

/// Path category of the quiver 0 -> 1 with one arrow a in Hom(0, 1).
inline AInftyCategory arrow_quiver() {
  AInftyCategory c({"0", "1"});
  c.set_hom(0, 0, {{"e0", 0}});
  c.set_hom(1, 1, {{"e1", 0}});
  c.set_hom(0, 1, {{"a", 0}});
  c.set_unit(0, {{0, Rational(1)}});
  c.set_unit(1, {{0, Rational(1)}});
  c.add_mult({L(0, 0, 0), L(0, 0, 0)}, 0, 1);
  c.add_mult({L(1, 1, 0), L(1, 1, 0)}, 0, 1);
  c.add_mult({L(0, 0, 0), L(0, 1, 0)}, 0, 1);
  c.add_mult({L(0, 1, 0), L(1, 1, 0)}, 0, 1);
  return c;
}

/// Trace pairing <E_ij, E_kl> = delta_jk delta_il on matrix_algebra(n).
inline CYStructure matrix_trace_pairing(std::shared_ptr<const AInftyCategory> m, int n) {
  CYStructure cy(m, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cy.set_pairing(0, 0, i * n + j, j * n + i, 1);
  return cy;
}

/// A graded complex: degrees of basis vectors and d (d maps degree k to k-1).
struct SmallComplex {
  std::vector<int> degrees;
  std::vector<std::vector<Rational>> d;  // d[i][j] = coefficient of e_i in d(e_j)
};

inline SmallComplex random_complex(std::mt19937& rng, int max_dim = 3) {
  std::uniform_int_distribution<int> dim(1, max_dim), deg(-1, 1), coef(-2, 2);
  SmallComplex c;
  const int n = dim(rng);
  for (int i = 0; i < n; ++i) c.degrees.push_back(deg(rng));
  c.d.assign(n, std::vector<Rational>(n));
  // d = sum of terms e_j -> e_i with deg i = deg j - 1, from degree 1 to 0 or
  // from 0 to -1, never both on a chain: pick one active pair of degrees
  const int top = std::uniform_int_distribution<int>(0, 1)(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c.degrees[j] == top && c.degrees[i] == top - 1) c.d[i][j] = coef(rng);
  return c;
}

/// dg category whose objects are complexes V_a and Hom(a, b) = Hom_K(V_b, V_a),
/// so that m_2(f, g) = f o g lands in Hom(a, c). Basis E_ij sends e_j to e_i
/// and has degree |e_i| - |e_j|; m_1 f = d f - (-1)^{|f|} f d.
inline AInftyCategory endomorphism_category(const std::vector<SmallComplex>& vs) {
  std::vector<std::string> names;
  for (std::size_t a = 0; a < vs.size(); ++a) names.push_back("V" + std::to_string(a));
  AInftyCategory c(names);
  auto idx = [&](ObjectId b, std::size_t i, std::size_t j) { return i * vs[b].degrees.size() + j; };
  for (ObjectId a = 0; a < vs.size(); ++a)
    for (ObjectId b = 0; b < vs.size(); ++b) {
      std::vector<BasisElement> basis;
      for (std::size_t i = 0; i < vs[a].degrees.size(); ++i)
        for (std::size_t j = 0; j < vs[b].degrees.size(); ++j)
          basis.push_back({"E" + std::to_string(i) + std::to_string(j), vs[a].degrees[i] - vs[b].degrees[j]});
      c.set_hom(a, b, basis);
    }
  for (ObjectId a = 0; a < vs.size(); ++a) {
    SparseVector u;
    for (std::size_t i = 0; i < vs[a].degrees.size(); ++i) u[i * vs[a].degrees.size() + i] = 1;
    c.set_unit(a, u);
  }
  // composition E_ij (Hom(a,b)) o E_jl (Hom(b,c)) = E_il
  for (ObjectId a = 0; a < vs.size(); ++a)
    for (ObjectId b = 0; b < vs.size(); ++b)
      for (ObjectId cc = 0; cc < vs.size(); ++cc)
        for (std::size_t i = 0; i < vs[a].degrees.size(); ++i)
          for (std::size_t j = 0; j < vs[b].degrees.size(); ++j)
            for (std::size_t l = 0; l < vs[cc].degrees.size(); ++l)
              c.add_mult({L(a, b, i * vs[b].degrees.size() + j), L(b, cc, j * vs[cc].degrees.size() + l)},
                         i * vs[cc].degrees.size() + l, 1);
  // differential on E_ij in Hom(a, b): d_a E_ij - (-1)^{|E_ij|} E_ij d_b
  for (ObjectId a = 0; a < vs.size(); ++a)
    for (ObjectId b = 0; b < vs.size(); ++b) {
      const auto& va = vs[a];
      const auto& vb = vs[b];
      for (std::size_t i = 0; i < va.degrees.size(); ++i)
        for (std::size_t j = 0; j < vb.degrees.size(); ++j) {
          const Letter e = L(a, b, idx(b, i, j));
          const int deg = va.degrees[i] - vb.degrees[j];
          // d_a E_ij = sum_k d_a[k][i] E_kj
          for (std::size_t k = 0; k < va.degrees.size(); ++k)
            if (!va.d[k][i].is_zero()) c.add_mult({e}, idx(b, k, j), va.d[k][i]);
          // E_ij d_b = sum_l d_b[j][l] E_il
          for (std::size_t l = 0; l < vb.degrees.size(); ++l)
            if (!vb.d[j][l].is_zero()) c.add_mult({e}, idx(b, i, l), -sign_of(deg) * vb.d[j][l]);
        }
    }
  return c;
}

/// Supertrace pairing <f, g> = str(f o g) with str(X) = sum_i (-1)^{|e_i|} X_ii,
/// a cyclic pairing of dimension 0 on endomorphism_category.
inline CYStructure supertrace_pairing(std::shared_ptr<const AInftyCategory> c, const std::vector<SmallComplex>& vs) {
  CYStructure cy(c, 0);
  for (ObjectId a = 0; a < vs.size(); ++a)
    for (ObjectId b = 0; b < vs.size(); ++b)
      for (std::size_t i = 0; i < vs[a].degrees.size(); ++i)
        for (std::size_t j = 0; j < vs[b].degrees.size(); ++j)
          // E_ij (Hom(a,b)) o E_ji (Hom(b,a)) = E_ii in End(V_a)
          cy.set_pairing(a, b, i * vs[b].degrees.size() + j, j * vs[a].degrees.size() + i,
                         sign_of(vs[a].degrees[i]));
  return cy;
}

// Objects 0..4 with arrows a, b, c, z, m3(a,b,c) = e, m2(e,z) = w,
// m2(c,z) = y and m3(a,b,y) = kappa w. Exactly one sign of kappa gives an
// A-infinity category.
inline AInftyCategory m3_quiver(int kappa) {
  AInftyCategory q({"0", "1", "2", "3", "4"});
  for (ObjectId o = 0; o < 5; ++o) {
    q.set_hom(o, o, {{"1_" + std::to_string(o), 0}});
    q.set_unit(o, {{0, Rational(1)}});
  }
  q.set_hom(0, 1, {{"a", 1}});
  q.set_hom(1, 2, {{"b", 0}});
  q.set_hom(2, 3, {{"c", 1}});
  q.set_hom(3, 4, {{"z", 1}});
  q.set_hom(0, 3, {{"e", 3}});
  q.set_hom(2, 4, {{"y", 2}});
  q.set_hom(0, 4, {{"w", 4}});
  // unit compositions
  for (ObjectId s = 0; s < 5; ++s)
    for (ObjectId t = 0; t < 5; ++t)
      for (std::size_t i = 0; i < q.hom(s, t).dim(); ++i) {
        q.add_mult({L(s, s, 0), L(s, t, i)}, i, 1);
        if (s != t) q.add_mult({L(s, t, i), L(t, t, 0)}, i, 1);
      }
  q.add_mult({L(0, 1, 0), L(1, 2, 0), L(2, 3, 0)}, 0, 1);
  q.add_mult({L(0, 3, 0), L(3, 4, 0)}, 0, 1);
  q.add_mult({L(2, 3, 0), L(3, 4, 0)}, 0, 1);
  q.add_mult({L(0, 1, 0), L(1, 2, 0), L(2, 4, 0)}, 0, kappa);
  return q;
}

}  // namespace fixtures
