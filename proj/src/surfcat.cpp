#include "octcft/surfcat.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <thread>

namespace octcft {

std::strong_ordering Slot::operator<=>(const Slot&) const = default;
bool Slot::operator==(const Slot&) const = default;
std::strong_ordering TreeNode::operator<=>(const TreeNode&) const = default;
bool TreeNode::operator==(const TreeNode&) const = default;

namespace {

int parity_sign(long e) { return (e % 2 == 0) ? 1 : -1; }

Slot external(std::size_t k) {
  Slot s;
  s.kind = SlotKind::External;
  s.ext = k;
  return s;
}

Slot marker(SlotKind k) {
  Slot s;
  s.kind = k;
  return s;
}

Slot child_slot(TreeNode t) {
  Slot s;
  s.kind = SlotKind::Child;
  s.child.push_back(std::move(t));
  return s;
}

std::string join(const std::vector<Brane>& ls) {
  std::string s;
  for (std::size_t i = 0; i < ls.size(); ++i) s += (i ? "," : "") + ls[i];
  return s;
}

// Boundary labels (before, after) of point p of a vertex with labels ls.
std::pair<Brane, Brane> point_labels(const std::vector<Brane>& ls, std::size_t p) {
  const std::size_t n = ls.size();
  return {ls[(p + n - 1) % n], ls[p % n]};
}

}  // namespace

OpenObject cyclic_object(const std::vector<Brane>& labels) {
  OpenObject o;
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    o.source.push_back(labels[i]);
    o.target.push_back(labels[(i + 1) % n]);
  }
  return o;
}

int DiscGenerator::degree() const {
  const int n = static_cast<int>(labels.size());
  const int d = plus ? 0 : shift;
  return n >= 3 ? n - 3 + d : d;
}

int rotation_sign(std::size_t n) { return parity_sign(static_cast<long>(n) - 1); }

DiscNormalForm normalize_disc(const std::vector<Brane>& labels) {
  const std::size_t n = labels.size();
  DiscNormalForm out;
  out.labels = labels;
  if (n == 0) return out;
  // D(l_k, ..., l_{k-1}) = rotation_sign^k D(l_0, ...)
  std::size_t best = 0;
  auto rotated = [&](std::size_t k) {
    std::vector<Brane> r(labels.begin() + k, labels.end());
    r.insert(r.end(), labels.begin(), labels.begin() + k);
    return r;
  };
  for (std::size_t k = 1; k < n; ++k)
    if (rotated(k) < rotated(best)) best = k;
  out.labels = rotated(best);
  // D(l) = rho^best D(rotated(best)) since each step is one rotation
  out.sign = best % 2 == 0 ? 1 : rotation_sign(n);
  for (std::size_t k = 1; k < n; ++k)
    if (rotated(k) == labels && (k % 2 == 1 && rotation_sign(n) == -1)) out.zero = true;
  return out;
}

int vertex_degree(const TreeNode& v, const Sector& s) {
  const int n = static_cast<int>(v.labels.size());
  switch (v.kind) {
    case VertexKind::Disc: {
      const int d = s.plus ? 0 : s.shift;
      return n >= 3 ? n - 3 + d : d;
    }
    case VertexKind::Annulus:
      return n - 1;
    case VertexKind::Wire:
      return 0;
  }
  return 0;
}

int node_degree(const Sector& s) { return s.plus ? 0 : -s.shift; }

int subtree_degree(const TreeNode& v, const Sector& s) {
  int d = vertex_degree(v, s);
  for (const auto& sl : v.slots)
    if (sl.kind == SlotKind::Child) d += node_degree(s) + subtree_degree(sl.child.front(), s);
  return d;
}

std::string render(const TreeNode& v) {
  std::string s;
  switch (v.kind) {
    case VertexKind::Disc: s = "D"; break;
    case VertexKind::Annulus: s = "A"; break;
    case VertexKind::Wire: s = "I"; break;
  }
  s += "(" + join(v.labels) + ")[";
  for (std::size_t p = 0; p < v.slots.size(); ++p) {
    if (p) s += ",";
    const auto& sl = v.slots[p];
    switch (sl.kind) {
      case SlotKind::External: s += "x" + std::to_string(sl.ext); break;
      case SlotKind::Parent: s += "^"; break;
      case SlotKind::Output: s += "out"; break;
      case SlotKind::Child: s += render(sl.child.front()); break;
    }
  }
  return s + "]";
}

void SurfaceChain::add(const TreeNode& t, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms.emplace(t, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

std::optional<int> SurfaceChain::degree() const {
  if (terms.empty()) return std::nullopt;
  return subtree_degree(terms.begin()->first, sector);
}

SurfaceChain disc_chain(const DiscGenerator& g) {
  SurfaceChain c;
  c.sector = Sector{g.plus, g.plus ? 0 : g.shift};
  TreeNode t;
  t.kind = VertexKind::Disc;
  t.labels = g.labels;
  if (g.plus) {
    t.slots.push_back(marker(SlotKind::Output));
    for (std::size_t k = 1; k < g.labels.size(); ++k) t.slots.push_back(external(k - 1));
  } else {
    for (std::size_t k = 0; k < g.labels.size(); ++k) t.slots.push_back(external(k));
  }
  c.add(t, Rational(1));
  return c;
}

SurfaceChain annulus_chain(const std::vector<Brane>& labels, const Sector& s) {
  SurfaceChain c;
  c.sector = s;
  TreeNode t;
  t.kind = VertexKind::Annulus;
  t.labels = labels;
  for (std::size_t k = 0; k < labels.size(); ++k) t.slots.push_back(external(k));
  c.add(t, Rational(1));
  return c;
}

namespace {

int branch_degree(const Slot& sl, const Sector& s) {
  return sl.kind == SlotKind::Child ? node_degree(s) + subtree_degree(sl.child.front(), s) : 0;
}

int range_degree(const std::vector<Slot>& slots, std::size_t from, std::size_t to, const Sector& s) {
  int d = 0;
  for (std::size_t p = from; p < to; ++p) d += branch_degree(slots[p], s);
  return d;
}

bool flipped(const SignFault& f, SignFault::Family fam, std::size_t absorbed) {
  return f.family == fam && f.absorbed == absorbed;
}

// Splittings of a single vertex, each already in canonical factor order.
std::vector<std::pair<int, TreeNode>> split_vertex(const TreeNode& v, const Sector& sec, const SignFault& fault) {
  std::vector<std::pair<int, TreeNode>> out;
  const std::size_t m = v.labels.size();
  const int d = sec.plus ? 0 : sec.shift;
  const auto& L = v.labels;
  const auto& ch = v.slots;
  if (v.kind == VertexKind::Wire) return out;

  auto inner_disc = [&](std::vector<Brane> labels, std::vector<Slot> slots) {
    TreeNode t;
    t.kind = VertexKind::Disc;
    t.labels = std::move(labels);
    t.slots.push_back(marker(SlotKind::Parent));
    for (auto& s : slots) t.slots.push_back(std::move(s));
    return t;
  };

  // non-wrapping splittings: the new disc absorbs points i+1..j
  const bool is_disc = v.kind == VertexKind::Disc;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 2; j < m; ++j) {
      if (is_disc && j - i > m - 2) continue;
      const long r = static_cast<long>(i), s = static_cast<long>(j - i), t = static_cast<long>(m - 1 - j);
      std::vector<Brane> il(L.begin() + i, L.begin() + j + 1);
      TreeNode inner = inner_disc(il, std::vector<Slot>(ch.begin() + i + 1, ch.begin() + j + 1));
      TreeNode outer;
      outer.kind = v.kind;
      outer.labels.assign(L.begin(), L.begin() + i + 1);
      outer.labels.insert(outer.labels.end(), L.begin() + j, L.end());
      outer.slots.assign(ch.begin(), ch.begin() + i + 1);
      const int inner_deg = node_degree(sec) + vertex_degree(inner, sec);
      outer.slots.push_back(child_slot(std::move(inner)));
      outer.slots.insert(outer.slots.end(), ch.begin() + j + 1, ch.end());
      long e = r + s * t;
      SignFault::Family fam = SignFault::Family::Disc;
      if (!is_disc) {
        e += d * s;
        fam = SignFault::Family::AnnulusInner;
      }
      int sign = parity_sign(e) * parity_sign(static_cast<long>(inner_deg) * range_degree(ch, 0, i + 1, sec));
      if (flipped(fault, fam, static_cast<std::size_t>(s))) sign = -sign;
      out.emplace_back(sign, std::move(outer));
    }
  if (is_disc) return out;

  // wrap-around splittings of an annulus: the disc absorbs i+1..m-1, 0..j
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = j; i < m; ++i) {
      if (j == 0 && i == m - 1) continue;
      std::vector<std::size_t> absorbed;
      for (std::size_t p = i + 1; p < m; ++p) absorbed.push_back(p);
      for (std::size_t p = 0; p <= j; ++p) absorbed.push_back(p);
      std::vector<Brane> il(L.begin() + i, L.end());
      il.insert(il.end(), L.begin(), L.begin() + j + 1);
      std::vector<Slot> islots;
      for (auto p : absorbed) islots.push_back(ch[p]);
      TreeNode inner = inner_disc(il, std::move(islots));
      TreeNode outer;
      outer.kind = VertexKind::Annulus;
      outer.labels.assign(L.begin() + j, L.begin() + i + 1);
      outer.slots.push_back(child_slot(std::move(inner)));
      outer.slots.insert(outer.slots.end(), ch.begin() + j + 1, ch.begin() + i + 1);
      const long p = static_cast<long>(m - 1 - i), q = static_cast<long>(j), u = static_cast<long>(i - j);
      const long e = 1 + p + u + q * (p + u) + d * (p + q + 1);
      int sign = parity_sign(e) * parity_sign(static_cast<long>(range_degree(ch, i + 1, m, sec)) *
                                              range_degree(ch, 0, i + 1, sec));
      if (flipped(fault, SignFault::Family::AnnulusWrap, absorbed.size())) sign = -sign;
      out.emplace_back(sign, std::move(outer));
    }
  return out;
}

// Boundary of the subtree v, given the total degree of the factors before it.
void boundary_rec(const TreeNode& v, long before, const Sector& sec, const SignFault& fault,
                  const std::function<void(int, TreeNode)>& emit) {
  const int k = parity_sign(before);
  for (auto& [s, t] : split_vertex(v, sec, fault)) emit(k * s, std::move(t));
  long acc = before + vertex_degree(v, sec);
  for (std::size_t p = 0; p < v.slots.size(); ++p) {
    if (v.slots[p].kind != SlotKind::Child) continue;
    acc += node_degree(sec);
    const TreeNode& c = v.slots[p].child.front();
    boundary_rec(c, acc, sec, fault, [&](int s, TreeNode t) {
      TreeNode copy = v;
      copy.slots[p].child.front() = std::move(t);
      emit(s, std::move(copy));
    });
    acc += subtree_degree(c, sec);
  }
}

}  // namespace

SurfaceChain boundary(const SurfaceChain& c, const SignFault& fault) {
  SurfaceChain out;
  out.sector = c.sector;
  for (const auto& [t, coeff] : c.terms)
    boundary_rec(t, 0, c.sector, fault, [&](int s, TreeNode nt) { out.add(nt, coeff * Rational(s)); });
  return out;
}

namespace {

std::vector<std::vector<Brane>> label_sequences(std::size_t n, std::size_t alphabet) {
  std::vector<Brane> letters;
  for (std::size_t i = 0; i < alphabet; ++i) letters.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<std::vector<Brane>> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<Brane> s;
    for (auto i : idx) s.push_back(letters[i]);
    out.push_back(std::move(s));
    std::size_t p = n;
    while (p > 0 && ++idx[p - 1] == alphabet) idx[--p] = 0;
    if (p == 0) break;
  }
  return out;
}

struct SeqResult {
  std::size_t boundary_terms = 0, square_terms = 0, surviving = 0;
  std::string failure;
};

SeqResult check_one(const SurfaceChain& g, const SignFault& fault) {
  SeqResult r;
  auto b = boundary(g, fault);
  r.boundary_terms = b.size();
  SurfaceChain bb;
  bb.sector = g.sector;
  for (const auto& [t, coeff] : b.terms)
    boundary_rec(t, 0, g.sector, fault, [&](int s, TreeNode nt) {
      ++r.square_terms;
      bb.add(nt, coeff * Rational(s));
    });
  r.surviving = bb.size();
  if (!bb.is_zero()) {
    const auto& [t, c] = *bb.terms.begin();
    r.failure = render(g.terms.begin()->first) + ": surviving term " + c.str() + " * " + render(t);
  }
  return r;
}

}  // namespace

SurfCheckReport check_d_squared(std::size_t max_n, int shift, std::size_t alphabet, const SignFault& fault,
                                unsigned threads) {
  if (alphabet == 0) throw std::invalid_argument("alphabet must be non-empty");
  SurfCheckReport rep;
  rep.shift = shift;
  rep.max_n = max_n;
  rep.alphabet = alphabet;
  const Sector sec{false, shift};

  struct Job {
    bool disc;
    std::size_t n;
    std::vector<Brane> labels;
  };
  std::vector<Job> jobs;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (auto& l : label_sequences(n, alphabet)) {
      if (n >= 3) jobs.push_back({true, n, l});
      jobs.push_back({false, n, l});
    }
  }
  std::vector<SeqResult> results(jobs.size());
  auto work = [&](std::size_t from, std::size_t step) {
    for (std::size_t k = from; k < jobs.size(); k += step) {
      const auto& j = jobs[k];
      auto g = j.disc ? disc_chain(DiscGenerator{j.labels, shift, false}) : annulus_chain(j.labels, sec);
      results[k] = check_one(g, fault);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  std::map<std::size_t, SurfArityStats> discs, annuli;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    auto& st = (jobs[k].disc ? discs : annuli)[jobs[k].n];
    st.arity = jobs[k].n;
    ++st.sequences;
    st.boundary_terms += results[k].boundary_terms;
    st.square_terms += results[k].square_terms;
    st.surviving += results[k].surviving;
    if (results[k].surviving && (!rep.first_failing_arity || jobs[k].n < *rep.first_failing_arity)) {
      rep.ok = false;
      rep.first_failing_arity = jobs[k].n;
      rep.first_failure = results[k].failure;
    }
  }
  for (auto& [n, s] : discs) rep.discs.push_back(s);
  for (auto& [n, s] : annuli) rep.annuli.push_back(s);
  return rep;
}

// ---------------------------------------------------------------------------
// Re-anchoring and gluing in the all-incoming sector.

namespace {

struct GraphSlot {
  bool is_ext = true;
  std::size_t index = 0;  // ext index or edge id
};

struct Graph {
  struct Vertex {
    VertexKind kind;
    std::vector<Brane> labels;
    std::vector<GraphSlot> slots;
  };
  std::vector<Vertex> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // oriented (from, to)
  std::vector<std::pair<bool, std::size_t>> order;         // (is_vertex, id) factor order
};

void to_graph(const TreeNode& t, Graph& g, std::optional<std::size_t> parent_edge) {
  const std::size_t vid = g.vertices.size();
  g.vertices.push_back({t.kind, t.labels, std::vector<GraphSlot>(t.slots.size())});
  g.order.push_back({true, vid});
  for (std::size_t p = 0; p < t.slots.size(); ++p) {
    const auto& sl = t.slots[p];
    switch (sl.kind) {
      case SlotKind::External:
        g.vertices[vid].slots[p] = {true, sl.ext};
        break;
      case SlotKind::Parent:
        g.vertices[vid].slots[p] = {false, *parent_edge};
        break;
      case SlotKind::Output:
        throw std::invalid_argument("re-anchoring applies to the all-incoming sector only");
      case SlotKind::Child: {
        const std::size_t eid = g.edges.size();
        g.edges.push_back({vid, 0});
        g.order.push_back({false, eid});
        g.vertices[vid].slots[p] = {false, eid};
        const std::size_t cid = g.vertices.size();
        to_graph(sl.child.front(), g, eid);
        g.edges[eid].second = cid;
        break;
      }
    }
  }
}

int permutation_sign(const std::vector<std::size_t>& perm, const std::vector<int>& degrees) {
  // perm[a] = old position of the factor now at position a
  long e = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) e += static_cast<long>(degrees[a]) * degrees[b];
  return parity_sign(e);
}

std::pair<int, TreeNode> canonical_from_graph(const Graph& g, const Sector& sec) {
  int sign = 1;
  std::size_t root = g.vertices.size();
  std::size_t anchor = 0;
  for (std::size_t v = 0; v < g.vertices.size() && root == g.vertices.size(); ++v)
    if (g.vertices[v].kind == VertexKind::Annulus) root = v;
  if (root == g.vertices.size()) {
    std::size_t best_ext = SIZE_MAX;
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
      for (std::size_t p = 0; p < g.vertices[v].slots.size(); ++p) {
        const auto& s = g.vertices[v].slots[p];
        if (s.is_ext && s.index < best_ext) {
          best_ext = s.index;
          root = v;
          anchor = p;
        }
      }
    if (root == g.vertices.size()) throw std::invalid_argument("diagram without external points");
  }
  std::vector<std::pair<bool, std::size_t>> new_order;
  std::function<TreeNode(std::size_t, std::size_t, std::optional<std::size_t>)> build =
      [&](std::size_t v, std::size_t k, std::optional<std::size_t> via) {
        const auto& vx = g.vertices[v];
        const std::size_t n = vx.slots.size();
        if (k % 2 == 1) sign *= rotation_sign(n);
        new_order.push_back({true, v});
        TreeNode t;
        t.kind = vx.kind;
        for (std::size_t a = 0; a < n; ++a) t.labels.push_back(vx.labels[(a + k) % n]);
        for (std::size_t a = 0; a < n; ++a) {
          const auto& s = vx.slots[(a + k) % n];
          if (a == 0 && via) {
            t.slots.push_back(marker(SlotKind::Parent));
            continue;
          }
          if (s.is_ext) {
            t.slots.push_back(external(s.index));
            continue;
          }
          const auto [from, to] = g.edges[s.index];
          const std::size_t other = from == v ? to : from;
          if (from != v) sign *= parity_sign(sec.shift);
          new_order.push_back({false, s.index});
          const auto& os = g.vertices[other].slots;
          std::size_t pos = 0;
          while (os[pos].is_ext || os[pos].index != s.index) ++pos;
          t.slots.push_back(child_slot(build(other, pos, s.index)));
        }
        return t;
      };
  TreeNode t = build(root, anchor, std::nullopt);
  std::map<std::pair<bool, std::size_t>, std::size_t> old_pos;
  for (std::size_t a = 0; a < g.order.size(); ++a) old_pos[g.order[a]] = a;
  std::vector<std::size_t> perm;
  std::vector<int> degs;
  for (const auto& f : new_order) {
    perm.push_back(old_pos.at(f));
    if (f.first) {
      TreeNode probe;
      probe.kind = g.vertices[f.second].kind;
      probe.labels = g.vertices[f.second].labels;
      degs.push_back(vertex_degree(probe, sec));
    } else {
      degs.push_back(node_degree(sec));
    }
  }
  sign *= permutation_sign(perm, degs);
  return {sign, std::move(t)};
}

bool is_cap(const TreeNode& t) {
  if (t.kind != VertexKind::Disc || t.labels.size() != 2) return false;
  return std::all_of(t.slots.begin(), t.slots.end(), [](const Slot& s) { return s.kind == SlotKind::External; });
}

std::pair<Brane, Brane> ext_labels(const TreeNode& t, std::size_t k, bool& found) {
  for (std::size_t p = 0; p < t.slots.size(); ++p) {
    const auto& s = t.slots[p];
    if (s.kind == SlotKind::External && s.ext == k) {
      found = true;
      return point_labels(t.labels, p);
    }
    if (s.kind == SlotKind::Child) {
      auto r = ext_labels(s.child.front(), k, found);
      if (found) return r;
    }
  }
  return {};
}

void renumber(TreeNode& t, const std::function<std::size_t(std::size_t)>& f) {
  for (auto& s : t.slots) {
    if (s.kind == SlotKind::External) s.ext = f(s.ext);
    if (s.kind == SlotKind::Child) renumber(s.child.front(), f);
  }
}

std::size_t count_ext(const TreeNode& t) {
  std::size_t n = 0;
  for (const auto& s : t.slots) {
    if (s.kind == SlotKind::External) ++n;
    if (s.kind == SlotKind::Child) n += count_ext(s.child.front());
  }
  return n;
}

}  // namespace

std::pair<int, TreeNode> canonical_form(const TreeNode& t, const Sector& s) {
  if (s.plus) throw std::invalid_argument("re-anchoring applies to the all-incoming sector only");
  Graph g;
  to_graph(t, g, std::nullopt);
  return canonical_from_graph(g, s);
}

SurfaceChain glue(const SurfaceChain& a, std::size_t p, const SurfaceChain& b, std::size_t q) {
  if (!(a.sector == b.sector) || a.sector.plus) throw std::invalid_argument("glue needs two all-incoming chains");
  SurfaceChain out;
  out.sector = a.sector;
  for (const auto& [ta, ca] : a.terms)
    for (const auto& [tb, cb] : b.terms) {
      bool fa = false, fb = false;
      auto la = ext_labels(ta, p, fa);
      auto lb = ext_labels(tb, q, fb);
      if (!fa || !fb) throw ObjectMismatch("glue: no such boundary point");
      if (la.first != lb.second || la.second != lb.first)
        throw ObjectMismatch("glue: point (" + la.first + "," + la.second + ") cannot meet (" + lb.first + "," +
                             lb.second + ")");
      const std::size_t na = count_ext(ta);
      auto ra = [&](std::size_t k) { return k < p ? k : k - 1; };
      auto rb = [&](std::size_t k) { return na - 1 + (k < q ? k : k - 1); };
      const Rational c = ca * cb;
      // a copairing node against a two-point disc is the identity
      if (is_cap(tb)) {
        TreeNode t = ta;
        const std::size_t other = tb.slots[0].ext == q ? tb.slots[1].ext : tb.slots[0].ext;
        renumber(t, [&](std::size_t k) { return k == p ? rb(other) : ra(k); });
        auto [s, ct] = canonical_form(t, out.sector);
        out.add(ct, c * Rational(s));
        continue;
      }
      if (is_cap(ta)) {
        TreeNode t = tb;
        const std::size_t other = ta.slots[0].ext == p ? ta.slots[1].ext : ta.slots[0].ext;
        renumber(t, [&](std::size_t k) { return k == q ? ra(other) : rb(k); });
        auto [s, ct] = canonical_form(t, out.sector);
        out.add(ct, c * Rational(s));
        continue;
      }
      Graph g;
      to_graph(ta, g, std::nullopt);
      const std::size_t offset_v = g.vertices.size();
      Graph gb;
      to_graph(tb, gb, std::nullopt);
      const std::size_t offset_e = g.edges.size() + 1;
      std::size_t va = 0, vb = 0, pa = 0, pb = 0;
      for (std::size_t v = 0; v < g.vertices.size(); ++v)
        for (std::size_t s = 0; s < g.vertices[v].slots.size(); ++s) {
          auto& sl = g.vertices[v].slots[s];
          if (!sl.is_ext) continue;
          if (sl.index == p) {
            va = v;
            pa = s;
          } else {
            sl.index = ra(sl.index);
          }
        }
      for (std::size_t v = 0; v < gb.vertices.size(); ++v)
        for (std::size_t s = 0; s < gb.vertices[v].slots.size(); ++s) {
          auto& sl = gb.vertices[v].slots[s];
          if (sl.is_ext) {
            if (sl.index == q) {
              vb = v;
              pb = s;
            } else {
              sl.index = rb(sl.index);
            }
          } else {
            sl.index += offset_e;
          }
        }
      const std::size_t new_edge = g.edges.size();
      g.edges.push_back({va, offset_v + vb});
      g.vertices[va].slots[pa] = {false, new_edge};
      gb.vertices[vb].slots[pb] = {false, new_edge};
      g.order.push_back({false, new_edge});
      for (auto [from, to] : gb.edges) g.edges.push_back({from + offset_v, to + offset_v});
      for (auto& v : gb.vertices) g.vertices.push_back(std::move(v));
      for (auto [isv, id] : gb.order) g.order.push_back({isv, isv ? id + offset_v : id + offset_e});
      auto [s, ct] = canonical_from_graph(g, out.sector);
      out.add(ct, c * Rational(s));
    }
  return out;
}

// ---------------------------------------------------------------------------
// D+ forests.

void ForestChain::add(const PlusForest& f, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms.emplace(f, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

PlusForest plus_disc(const std::vector<Brane>& labels) {
  if (labels.empty()) throw std::invalid_argument("a disc needs at least one label");
  if (labels.size() == 2) return identity_wire(labels[0], labels[1]);
  return PlusForest{{disc_chain(DiscGenerator{labels, 0, true}).terms.begin()->first}};
}

PlusForest identity_wire(const Brane& from, const Brane& to) {
  TreeNode t;
  t.kind = VertexKind::Wire;
  t.labels = {from, to};
  t.slots.push_back(external(0));
  return PlusForest{{t}};
}

namespace {

std::size_t forest_inputs(const PlusForest& f) {
  std::size_t n = 0;
  for (const auto& r : f.roots) n += count_ext(r);
  return n;
}

// Output boundary (source, target) of a D+ tree root.
std::pair<Brane, Brane> output_boundary(const TreeNode& t) {
  if (t.kind == VertexKind::Wire) return {t.labels[0], t.labels[1]};
  return {t.labels.front(), t.labels.back()};
}

void collect_inputs(const TreeNode& t, std::map<std::size_t, std::pair<Brane, Brane>>& out) {
  if (t.kind == VertexKind::Wire) {
    out[t.slots[0].ext] = {t.labels[0], t.labels[1]};
    return;
  }
  for (std::size_t p = 0; p < t.slots.size(); ++p) {
    const auto& s = t.slots[p];
    if (s.kind == SlotKind::External) out[s.ext] = point_labels(t.labels, p);
    if (s.kind == SlotKind::Child) collect_inputs(s.child.front(), out);
  }
}

int plus_vertex_degree(const TreeNode& t) { return vertex_degree(t, Sector{true, 0}); }

// Pre-order factor degrees of a tree (wires contribute nothing).
void factor_degrees(const TreeNode& t, std::vector<int>& out) {
  if (t.kind == VertexKind::Wire) return;
  out.push_back(plus_vertex_degree(t));
  for (const auto& s : t.slots)
    if (s.kind == SlotKind::Child) factor_degrees(s.child.front(), out);
}

// Unit relations. Returns the reduced slot content, nullopt for zero.
std::optional<Slot> reduce_slot(const Slot& s) {
  if (s.kind != SlotKind::Child) return s;
  TreeNode t = s.child.front();
  for (auto& c : t.slots) {
    if (c.kind != SlotKind::Child) continue;
    auto r = reduce_slot(c);
    if (!r) return std::nullopt;
    c = std::move(*r);
  }
  const std::size_t n = t.labels.size();
  if (n == 2) return t.slots[1];
  for (std::size_t p = 1; p < n; ++p) {
    const auto& c = t.slots[p];
    if (c.kind != SlotKind::Child || c.child.front().labels.size() != 1) continue;
    if (n >= 4) return std::nullopt;
    if (n == 3) return t.slots[p == 1 ? 2 : 1];
  }
  return child_slot(std::move(t));
}

std::optional<TreeNode> reduce_root(const TreeNode& root) {
  if (root.kind == VertexKind::Wire) return root;
  Slot wrapped = child_slot(root);
  auto r = reduce_slot(wrapped);
  if (!r) return std::nullopt;
  if (r->kind == SlotKind::Child) {
    TreeNode t = std::move(r->child.front());
    t.slots[0] = marker(SlotKind::Output);
    return t;
  }
  TreeNode w;
  w.kind = VertexKind::Wire;
  auto [a, b] = output_boundary(root);
  w.labels = {a, b};
  w.slots.push_back(*r);
  return w;
}

}  // namespace

PlusForest tensor(const PlusForest& a, const PlusForest& b) {
  PlusForest out = a;
  const std::size_t shift = forest_inputs(a);
  for (auto r : b.roots) {
    renumber(r, [&](std::size_t k) { return k + shift; });
    out.roots.push_back(std::move(r));
  }
  return out;
}

OpenObject forest_source(const PlusForest& f) {
  std::map<std::size_t, std::pair<Brane, Brane>> in;
  for (const auto& r : f.roots) collect_inputs(r, in);
  OpenObject o;
  for (const auto& [k, st] : in) {
    o.source.push_back(st.first);
    o.target.push_back(st.second);
  }
  return o;
}

OpenObject forest_target(const PlusForest& f) {
  OpenObject o;
  for (const auto& r : f.roots) {
    auto [a, b] = output_boundary(r);
    o.source.push_back(a);
    o.target.push_back(b);
  }
  return o;
}

namespace {

std::pair<int, std::optional<PlusForest>> compose_forests(const PlusForest& f, const PlusForest& g) {
  if (!(forest_target(f) == forest_source(g))) throw ObjectMismatch("compose: target of f is not the source of g");
  // old factor order: g's vertices, then f's
  std::vector<int> gdeg, fdeg;
  for (const auto& r : g.roots) factor_degrees(r, gdeg);
  std::vector<std::size_t> f_offset;
  for (const auto& r : f.roots) {
    f_offset.push_back(fdeg.size());
    factor_degrees(r, fdeg);
  }
  std::vector<std::size_t> perm;
  std::vector<int> degs;
  std::size_t gcount = 0;
  auto note_f = [&](std::size_t k) {
    std::vector<int> local;
    factor_degrees(f.roots[k], local);
    for (std::size_t a = 0; a < local.size(); ++a) {
      perm.push_back(gdeg.size() + f_offset[k] + a);
      degs.push_back(local[a]);
    }
  };
  std::function<TreeNode(const TreeNode&)> substitute = [&](const TreeNode& t) {
    TreeNode out = t;
    perm.push_back(gcount++);
    degs.push_back(plus_vertex_degree(t));
    for (auto& s : out.slots) {
      if (s.kind == SlotKind::External) {
        const TreeNode& sub = f.roots[s.ext];
        if (sub.kind == VertexKind::Wire) {
          s.ext = sub.slots[0].ext;
        } else {
          note_f(s.ext);
          TreeNode c = sub;
          c.slots[0] = marker(SlotKind::Parent);
          s = child_slot(std::move(c));
        }
      } else if (s.kind == SlotKind::Child) {
        s.child.front() = substitute(s.child.front());
      }
    }
    return out;
  };
  PlusForest out;
  for (const auto& r : g.roots) {
    if (r.kind == VertexKind::Wire) {
      const TreeNode& sub = f.roots[r.slots[0].ext];
      note_f(r.slots[0].ext);
      out.roots.push_back(sub);
    } else {
      out.roots.push_back(substitute(r));
    }
  }
  const int sign = permutation_sign(perm, degs);
  for (auto& r : out.roots) {
    auto red = reduce_root(r);
    if (!red) return {sign, std::nullopt};
    r = std::move(*red);
  }
  return {sign, out};
}

}  // namespace

ForestChain compose(const ForestChain& f, const ForestChain& g) {
  ForestChain out;
  for (const auto& [tf, cf] : f.terms)
    for (const auto& [tg, cg] : g.terms) {
      auto [s, r] = compose_forests(tf, tg);
      if (r) out.add(*r, cf * cg * Rational(s));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Action on a unital A-infinity category.

std::vector<ObjectId> resolve_labels(const std::vector<Brane>& labels, const AInftyCategory& cat) {
  std::vector<ObjectId> out;
  for (const auto& l : labels) {
    auto it = std::find(cat.objects().begin(), cat.objects().end(), l);
    if (it == cat.objects().end()) throw ObjectMismatch("label '" + l + "' is not an object of the category");
    out.push_back(static_cast<ObjectId>(it - cat.objects().begin()));
  }
  return out;
}

namespace {

void traversal_exts(const TreeNode& t, std::vector<std::size_t>& out) {
  for (const auto& s : t.slots) {
    if (s.kind == SlotKind::External) out.push_back(s.ext);
    if (s.kind == SlotKind::Child) traversal_exts(s.child.front(), out);
  }
}

struct Evaluated {
  HomElement value;
  int degree = 0;
};

// inputs are in traversal order; pos advances over them
Evaluated eval_rec(const TreeNode& t, const std::vector<Letter>& inputs, std::size_t& pos, const AInftyCategory& cat) {
  if (t.kind == VertexKind::Wire) {
    const Letter& x = inputs[pos++];
    return {HomElement{x.source, x.target, SparseVector{{x.index, Rational(1)}}}, cat.degree(x)};
  }
  const auto obj = resolve_labels(t.labels, cat);
  const std::size_t n = t.labels.size();
  if (n == 1) {
    if (!cat.has_unit(obj[0])) throw InvalidStructure("object " + t.labels[0] + " has no unit");
    return {HomElement{obj[0], obj[0], cat.unit(obj[0])}, 0};
  }
  if (static_cast<int>(n) - 1 > cat.max_arity())
    throw ArityExceedsBound("D+ with " + std::to_string(n) + " labels exceeds the arity bound " +
                            std::to_string(cat.max_arity()));
  std::vector<HomElement> args;
  int sign = 1;
  long consumed = 0;  // total degree of the inputs fed to earlier slots
  int deg = vertex_degree(t, Sector{true, 0});
  for (std::size_t p = 1; p < n; ++p) {
    const auto& s = t.slots[p];
    if (s.kind == SlotKind::External) {
      const Letter& x = inputs[pos++];
      args.push_back({x.source, x.target, SparseVector{{x.index, Rational(1)}}});
      consumed += cat.degree(x);
      deg += cat.degree(x);
      continue;
    }
    const TreeNode& c = s.child.front();
    const int cdeg = subtree_degree(c, Sector{true, 0});
    sign *= parity_sign(static_cast<long>(cdeg) * consumed);
    auto e = eval_rec(c, inputs, pos, cat);
    consumed += e.degree - cdeg;
    deg += e.degree;
    args.push_back(std::move(e.value));
  }
  if (n == 2) return {std::move(args.front()), deg};
  auto r = cat.mult(args);
  if (sign < 0)
    for (auto& [k, v] : r.coords) v = -v;
  return {std::move(r), deg};
}

std::vector<std::vector<Letter>> words_over(const std::vector<std::pair<ObjectId, ObjectId>>& homs,
                                            const AInftyCategory& cat) {
  std::vector<std::vector<Letter>> out{{}};
  for (auto [a, b] : homs) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : out)
      for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
        auto v = w;
        v.push_back(Letter{a, b, i});
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

HomElement evaluate_tree(const TreeNode& t, const std::vector<Letter>& inputs, const AInftyCategory& cat) {
  std::vector<std::size_t> order;
  if (t.kind == VertexKind::Wire) order.push_back(t.slots[0].ext);
  else traversal_exts(t, order);
  if (order.size() != inputs.size()) throw std::invalid_argument("evaluate_tree: wrong number of inputs");
  std::vector<Letter> ordered;
  std::vector<int> degs;
  for (auto k : order) {
    ordered.push_back(inputs.at(k));
    degs.push_back(cat.degree(inputs[k]));
  }
  const int sign = permutation_sign(order, degs);
  std::size_t pos = 0;
  auto e = eval_rec(t, ordered, pos, cat);
  if (sign < 0)
    for (auto& [k, v] : e.value.coords) v = -v;
  return std::move(e.value);
}

namespace {

ModuleMap act_between(const ForestChain& c, const OpenObject& source, const OpenObject& target,
                      const AInftyCategory& cat) {
  ModuleMap m;
  m.source = source;
  m.target = target;
  std::vector<std::pair<ObjectId, ObjectId>> in, out;
  for (std::size_t k = 0; k < m.source.count(); ++k)
    in.push_back({resolve_labels({m.source.source[k]}, cat)[0], resolve_labels({m.source.target[k]}, cat)[0]});
  for (std::size_t k = 0; k < m.target.count(); ++k)
    out.push_back({resolve_labels({m.target.source[k]}, cat)[0], resolve_labels({m.target.target[k]}, cat)[0]});
  m.input_words = words_over(in, cat);
  m.output_words = words_over(out, cat);
  std::map<std::vector<Letter>, std::size_t> row_of;
  for (std::size_t r = 0; r < m.output_words.size(); ++r) row_of[m.output_words[r]] = r;
  m.matrix = SparseMatrix(m.output_words.size(), m.input_words.size());
  const Sector plus{true, 0};
  for (const auto& [f, coeff] : c.terms) {
    if (!(forest_source(f) == m.source) || !(forest_target(f) == m.target))
      throw ObjectMismatch("act_on_module: terms have different boundaries");
    for (std::size_t col = 0; col < m.input_words.size(); ++col) {
      const auto& w = m.input_words[col];
      // (T_1 (x) T_2 (x) ...)(w): Koszul sign for each tree passing earlier inputs
      std::vector<std::pair<SparseVector, std::pair<ObjectId, ObjectId>>> parts;
      int sign = 1;
      long consumed = 0;
      for (const auto& r : f.roots) {
        std::vector<std::size_t> exts;
        if (r.kind == VertexKind::Wire) exts.push_back(r.slots[0].ext);
        else traversal_exts(r, exts);
        std::vector<Letter> local(exts.size());
        std::vector<std::size_t> sorted = exts;
        std::sort(sorted.begin(), sorted.end());
        std::map<std::size_t, std::size_t> relabel;
        for (std::size_t a = 0; a < sorted.size(); ++a) relabel[sorted[a]] = a;
        TreeNode rr = r;
        renumber(rr, [&](std::size_t k) { return relabel.at(k); });
        for (std::size_t a = 0; a < sorted.size(); ++a) local[a] = w[sorted[a]];
        const int rdeg = r.kind == VertexKind::Wire ? 0 : subtree_degree(r, plus);
        sign *= parity_sign(static_cast<long>(rdeg) * consumed);
        for (const auto& x : local) consumed += cat.degree(x);
        auto v = evaluate_tree(rr, local, cat);
        parts.push_back({std::move(v.coords), {v.source, v.target}});
      }
      // tensor product of the parts
      std::vector<std::pair<std::vector<Letter>, Rational>> acc{{{}, Rational(sign)}};
      for (const auto& [vec, st] : parts) {
        std::vector<std::pair<std::vector<Letter>, Rational>> next;
        for (const auto& [word, x] : acc)
          for (const auto& [i, y] : vec) {
            auto nw = word;
            nw.push_back(Letter{st.first, st.second, i});
            next.push_back({std::move(nw), x * y});
          }
        acc = std::move(next);
      }
      for (const auto& [word, x] : acc) m.matrix.add(row_of.at(word), col, coeff * x);
    }
  }
  return m;
}

}  // namespace

ModuleMap act_on_module(const ForestChain& c, const AInftyCategory& cat) {
  if (c.terms.empty()) throw std::invalid_argument("act_on_module needs a nonzero chain to fix its boundary");
  const PlusForest& first = c.terms.begin()->first;
  return act_between(c, forest_source(first), forest_target(first), cat);
}

ModuleMap act_on_module(const SurfaceChain& c, const AInftyCategory& cat) {
  if (!c.sector.plus) throw std::invalid_argument("act_on_module takes D+ chains");
  ForestChain f;
  for (const auto& [t, coeff] : c.terms) {
    if (t.kind == VertexKind::Annulus) throw std::invalid_argument("act_on_module: annuli do not act on modules");
    f.add(PlusForest{{t}}, coeff);
  }
  return act_on_module(f, cat);
}

namespace {

// m_1 on basis words, Koszul sign for passing the earlier letters.
SparseMatrix tensor_differential(const std::vector<std::vector<Letter>>& words, const AInftyCategory& cat) {
  std::map<std::vector<Letter>, std::size_t> index;
  for (std::size_t k = 0; k < words.size(); ++k) index[words[k]] = k;
  SparseMatrix d(words.size(), words.size());
  for (std::size_t col = 0; col < words.size(); ++col) {
    const auto& w = words[col];
    long before = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (const auto& [j, c] : cat.mult(std::vector<Letter>{w[i]})) {
        auto nw = w;
        nw[i].index = j;
        d.add(index.at(nw), col, c * Rational(parity_sign(before)));
      }
      before += cat.degree(w[i]);
    }
  }
  return d;
}

}  // namespace

ModuleMap differential_defect(const SurfaceChain& t, const AInftyCategory& cat, const SignFault& fault) {
  if (!t.sector.plus || t.is_zero()) throw std::invalid_argument("differential_defect takes a nonzero D+ chain");
  ForestChain f, df;
  for (const auto& [tree, c] : t.terms) f.add(PlusForest{{tree}}, c);
  for (const auto& [tree, c] : boundary(t, fault).terms) df.add(PlusForest{{tree}}, c);
  const PlusForest& first = f.terms.begin()->first;
  auto act = act_between(f, forest_source(first), forest_target(first), cat);
  auto out = act_between(df, act.source, act.target, cat);
  const int deg = *t.degree();
  out.matrix = out.matrix + tensor_differential(act.output_words, cat) * act.matrix -
               (act.matrix * tensor_differential(act.input_words, cat)).scaled(Rational(parity_sign(deg)));
  return out;
}

CheckReport check_plus_boundary(const AInftyCategory& cat, int max_arity, const SignFault& fault) {
  if (max_arity > cat.max_arity())
    throw ArityExceedsBound("requested arity " + std::to_string(max_arity) + " exceeds the arity bound " +
                            std::to_string(cat.max_arity()));
  CheckReport rep{"plus_boundary"};
  const std::size_t objs = cat.object_count();
  for (ObjectId a = 0; a < objs; ++a)
    for (ObjectId b = 0; b < objs; ++b) {
      std::vector<std::vector<Letter>> words;
      for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) words.push_back({Letter{a, b, i}});
      auto d = tensor_differential(words, cat);
      if (!(d * d).is_zero())
        rep.fail("m_1 does not square to zero on Hom(" + cat.object_name(a) + "," + cat.object_name(b) + ")");
    }
  for (int n = 2; n <= max_arity; ++n) {
    std::vector<std::size_t> idx(n + 1, 0);
    while (true) {
      std::vector<Brane> labels;
      for (auto i : idx) labels.push_back(cat.object_name(i));
      auto m = differential_defect(disc_chain(DiscGenerator{labels, 0, true}), cat, fault);
      if (!m.matrix.is_zero()) rep.fail("boundary of D+(" + join(labels) + ") does not act as zero up to m_1");
      std::size_t p = idx.size();
      while (p > 0 && ++idx[p - 1] == objs) idx[--p] = 0;
      if (p == 0) break;
    }
  }
  return rep;
}

std::optional<AnnulusGenerator> glue_unit_to_annulus(const AnnulusGenerator& a, std::size_t p) {
  const std::size_t n = a.labels.size();
  if (a.free_basepoint) throw std::invalid_argument("annulus already has its basepoint in a free boundary");
  if (p >= n) throw ObjectMismatch("annulus has no point " + std::to_string(p));
  auto [before, after] = point_labels(a.labels, p);
  if (before != after) throw ObjectMismatch("unit disc needs equal labels on both sides of the point");
  if (p != 0) return std::nullopt;
  return AnnulusGenerator{a.labels, true};
}

}  // namespace octcft
