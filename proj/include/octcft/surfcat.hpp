#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "octcft/ainfty.hpp"
#include "octcft/rational.hpp"

namespace octcft {

/// D-brane label.
using Brane = std::string;

struct ObjectMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArityExceedsBound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Open boundary object: O intervals, interval i running from source[i] to
/// target[i].
struct OpenObject {
  std::vector<Brane> source, target;
  std::size_t count() const { return source.size(); }
  friend bool operator==(const OpenObject&, const OpenObject&) = default;
};

/// {l_0, ..., l_{n-1}}^c: n intervals (l_{i-1}, l_i) around a disc or annulus.
OpenObject cyclic_object(const std::vector<Brane>& labels);

/// Disc with cyclically ordered labels. `plus` puts the outgoing point
/// between l_{n-1} and l_0 (D+), otherwise all points are incoming (D).
struct DiscGenerator {
  std::vector<Brane> labels;
  int shift = 0;
  bool plus = false;
  int degree() const;
};

/// Annulus A(l_0, ..., l_{n-1}); the closed boundary is parameterised from
/// the open point between l_{n-1} and l_0. With free_basepoint the start lies
/// in the free boundary l_0 instead (a disc with one point glued at point 0).
struct AnnulusGenerator {
  std::vector<Brane> labels;
  bool free_basepoint = false;
  int degree() const { return static_cast<int>(labels.size()) - 1; }
};

/// Sign of D(l_0, ..., l_{n-1}) = rotation_sign(n) D(l_1, ..., l_{n-1}, l_0).
int rotation_sign(std::size_t n);

/// Cyclic normal form of an all-incoming disc: lexicographically least
/// rotation and the sign relating it to the input. `zero` when a rotation
/// fixing the labels carries sign -1.
struct DiscNormalForm {
  std::vector<Brane> labels;
  int sign = 1;
  bool zero = false;
};
DiscNormalForm normalize_disc(const std::vector<Brane>& labels);

// ---------------------------------------------------------------------------
// Diagrams. A connected diagram is a tree of generators joined at nodes,
// stored rooted: every vertex lists its points in cyclic order starting from
// its anchor (the node towards the root, or for the root its first
// external point / output / basepoint). Vertices are ordered by pre-order
// traversal; the sign of a stored diagram is taken relative to the tensor
// product of its vertices (and node factors) in that order.

enum class VertexKind { Disc, Annulus, Wire };
enum class SlotKind { External, Parent, Output, Child };

struct TreeNode;

struct Slot {
  SlotKind kind = SlotKind::External;
  std::size_t ext = 0;          // External: index of the boundary point
  std::vector<TreeNode> child;  // Child: exactly one subtree
  std::strong_ordering operator<=>(const Slot&) const;
  bool operator==(const Slot&) const;
};

struct TreeNode {
  VertexKind kind = VertexKind::Disc;
  std::vector<Brane> labels;
  std::vector<Slot> slots;
  std::strong_ordering operator<=>(const TreeNode&) const;
  bool operator==(const TreeNode&) const;
};

/// `plus`: the D+ sector, nodes are plain compositions (degree 0) and discs
/// have degree n - 3. Otherwise discs have degree n - 3 + shift and every
/// node carries the copairing, of degree -shift.
struct Sector {
  bool plus = false;
  int shift = 0;
  friend bool operator==(const Sector&, const Sector&) = default;
};

int vertex_degree(const TreeNode& v, const Sector& s);
int node_degree(const Sector& s);
/// Degree of a subtree: its vertices and the nodes below its root.
int subtree_degree(const TreeNode& v, const Sector& s);

std::string render(const TreeNode& v);

/// Rational combination of diagrams in one sector, fully reduced.
struct SurfaceChain {
  Sector sector;
  std::map<TreeNode, Rational> terms;

  void add(const TreeNode& t, const Rational& c);
  bool is_zero() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
  /// Common degree of the terms; nullopt when empty.
  std::optional<int> degree() const;
};

SurfaceChain disc_chain(const DiscGenerator& g);
SurfaceChain annulus_chain(const std::vector<Brane>& labels, const Sector& s);

/// Deliberate sign flip on one family of splittings, for negative controls.
struct SignFault {
  enum class Family { None, Disc, AnnulusInner, AnnulusWrap };
  Family family = Family::None;
  std::size_t absorbed = 2;  // flip only splittings absorbing this many points
};

/// Boundary map, applied vertex by vertex with Koszul signs:
///   dD(l_0..l_{n-1}) = sum (-1)^{r+st} D(l_0..l_i, l_j..l_{n-1}) * D(l_i..l_j)
/// with r = i, s = j - i, t = n - 1 - j; the annulus has a non-wrapping sum
/// with sign (-1)^{r+st+ds} and a wrap-around sum (the disc absorbs the
/// basepoint) with sign (-1)^{1+p+u+q(p+u)+d(p+q+1)}, p = n-1-i, q = j,
/// u = i - j.
SurfaceChain boundary(const SurfaceChain& c, const SignFault& fault = {});

struct SurfArityStats {
  std::size_t arity = 0;
  std::size_t sequences = 0;
  std::size_t boundary_terms = 0;  // total terms of dg over all sequences
  std::size_t square_terms = 0;    // contributions to ddg before cancellation
  std::size_t surviving = 0;       // nonzero terms of ddg
};

struct SurfCheckReport {
  bool ok = true;
  int shift = 0;
  std::size_t max_n = 0, alphabet = 0;
  std::vector<SurfArityStats> discs, annuli;
  std::optional<std::size_t> first_failing_arity;
  std::string first_failure;  // offending generator and a surviving term
};

/// d^2 = 0 for D(l) with 3 <= n <= max_n and A(l) with 1 <= n <= max_n over
/// all label sequences from an alphabet of the given size. `threads` > 1
/// splits the label sequences between worker threads.
SurfCheckReport check_d_squared(std::size_t max_n, int shift, std::size_t alphabet, const SignFault& fault = {},
                                unsigned threads = 1);

// ---------------------------------------------------------------------------
// All-incoming sector: gluing two diagrams along external points.

/// Re-anchors a connected open-sector diagram at the vertex holding external
/// point 0 (rotations cost rotation_sign, reversing a node costs (-1)^shift,
/// reordering factors costs Koszul signs).
std::pair<int, TreeNode> canonical_form(const TreeNode& t, const Sector& s);

/// Glue external point p of a to external point q of b with a copairing
/// node. Boundary points of the result are those of a (in order, minus p)
/// followed by those of b (minus q), renumbered from 0. Two-point discs
/// glued this way cancel against the node (cap after cup is the identity).
SurfaceChain glue(const SurfaceChain& a, std::size_t p, const SurfaceChain& b, std::size_t q);

// ---------------------------------------------------------------------------
// D+ sector morphisms: forests of D+ trees and identity wires.

/// A morphism of the D+ category: one tree per output boundary. Leaves are
/// External slots numbered by input boundary.
struct PlusForest {
  std::vector<TreeNode> roots;
  friend bool operator==(const PlusForest&, const PlusForest&) = default;
  friend std::strong_ordering operator<=>(const PlusForest& a, const PlusForest& b) { return a.roots <=> b.roots; }
};

struct ForestChain {
  std::map<PlusForest, Rational> terms;
  void add(const PlusForest& f, const Rational& c);
  bool is_zero() const { return terms.empty(); }
};

PlusForest plus_disc(const std::vector<Brane>& labels);
PlusForest identity_wire(const Brane& from, const Brane& to);
/// Tensor product: b's inputs are renumbered after a's.
PlusForest tensor(const PlusForest& a, const PlusForest& b);

OpenObject forest_source(const PlusForest& f);
OpenObject forest_target(const PlusForest& f);

/// g o f (first f, then g). Reduces with the unit relations:
/// D+(.., l, l, ..) o D+(l) is 0 for n >= 4 and the identity for n = 3.
ForestChain compose(const ForestChain& f, const ForestChain& g);

/// A D+ chain acting on a unital A-infinity category: every D+ disc with n
/// labels acts as m_{n-1} (the one-point disc as the unit), nodes compose.
/// Rows index basis words of the outputs, columns basis words of the inputs,
/// both in lexicographic order of letters per boundary.
struct ModuleMap {
  OpenObject source, target;
  std::vector<std::vector<Letter>> input_words, output_words;
  SparseMatrix matrix;
};

ModuleMap act_on_module(const ForestChain& c, const AInftyCategory& cat);
/// Single-output chains (e.g. the boundary of a D+ disc).
ModuleMap act_on_module(const SurfaceChain& c, const AInftyCategory& cat);

/// act(dT) + d o act(T) - (-1)^{|T|} act(T) o d, d being m_1 extended to
/// tensor words with Koszul signs. Vanishes when the action is a chain map.
ModuleMap differential_defect(const SurfaceChain& t, const AInftyCategory& cat, const SignFault& fault = {});

/// The boundary of every D+ disc with 3 .. max_arity + 1 labels (all label
/// sequences over the objects) must act as zero up to the differential, and
/// m_1 must square to zero. Equivalent to the A-infinity relations up to
/// arity max_arity.
CheckReport check_plus_boundary(const AInftyCategory& cat, int max_arity, const SignFault& fault = {});

/// Evaluates one D+ tree on basis letters fed to its external points
/// (inputs[k] goes to External k). Returns the output in Hom(l_0, l_{n-1})
/// of the root, including the Koszul sign of the evaluation.
HomElement evaluate_tree(const TreeNode& t, const std::vector<Letter>& inputs, const AInftyCategory& cat);

/// Object ids of the category for the given labels; throws ObjectMismatch.
std::vector<ObjectId> resolve_labels(const std::vector<Brane>& labels, const AInftyCategory& cat);

/// Unit disc glued to point p of an annulus: zero unless p is the basepoint,
/// where the basepoint moves into the free boundary.
std::optional<AnnulusGenerator> glue_unit_to_annulus(const AnnulusGenerator& a, std::size_t p);

}  // namespace octcft
