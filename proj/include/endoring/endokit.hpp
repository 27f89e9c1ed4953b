#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "endoring/exactnum.hpp"
#include "endoring/groupkit.hpp"

namespace endoring {

using GroupRef = std::shared_ptr<const GroupDesc>;

/// Coordinate bookkeeping shared by every endomorphism of one group.
struct Layout {
  std::vector<Coord> tf_coords;  // finite-rank torsion-free copies, block order
  std::map<Coord, std::size_t> tf_index;
  std::optional<std::uint32_t> free_block;  // the FreeOmega block, if any
  std::map<Prime, std::vector<Coord>> prufer_coords;  // finite Prufer copies per prime
  std::set<Prime> scalar_prufer_primes;  // primes with an omega Prufer block

  explicit Layout(const GroupDesc& g);
};

/// Action on the Prufer p-copies: a single p-local scalar when some p-block
/// has omega copies, a matrix over Layout::prufer_coords[p] otherwise.
struct DivAction {
  bool scalar_form = false;
  Rational scalar;
  RatMatrix matrix;
  bool operator==(const DivAction&) const = default;
};

/// Finitary summand. Cyclic source copy c: e_c additionally maps to `image`.
/// Torsion-free source copy: x maps to (x mod modulus) * image.
struct FinEntry {
  Coord source;
  std::optional<Integer> modulus;
  Element image;
  bool operator==(const FinEntry&) const = default;
};

/// Hom(Q^pi, Z(p^inf)) summand: x -> p-primary part of (scale * x mod 1),
/// placed on a Prufer copy.
struct TauEntry {
  Coord source;
  Coord target;
  Rational scale;
  bool operator==(const TauEntry&) const = default;
};

/// Representable endomorphism in normal form:
///   tf   rational matrix over finite torsion-free copies (target row, source col)
///   free integer scalar on the FreeOmega block
///   div  per-prime Prufer action
///   cyc  one residue per cyclic block (index = block index, 0 elsewhere)
///   fin  finitary corrections, tau twisted maps
struct Endo {
  GroupRef group;
  RatMatrix tf;
  Integer free_scalar = 0;
  std::map<Prime, DivAction> div;
  std::vector<Integer> cyc;
  std::vector<FinEntry> fin;
  std::vector<TauEntry> tau;
  /// Problems recorded while building from text; surfaced by validate.
  std::vector<std::string> deferred_issues;

  static Endo zero(GroupRef g);
  static Endo identity(GroupRef g);
  const GroupDesc& g() const { return *group; }
};

using MultValue = std::variant<Rational, JElement>;
std::string to_string(const MultValue& v);

struct QuasiParams {
  Integer r;
  std::vector<Prime> pi;
  MultValue scalar;
};

struct SemiParams {
  Integer n;
  std::vector<Prime> pi;
  MultValue alpha;
};

struct MiniParams {
  Integer n;
  std::vector<Prime> pi;
};

struct FmSplit {
  Endo fin;
  Endo qm;
};

struct EndoClass {
  bool finitary = false;
  std::optional<MultValue> multiplication;
  std::optional<QuasiParams> quasi;
  std::optional<SemiParams> semi;
  std::optional<MiniParams> mini;
  bool fm = false;
};

// -- construction -----------------------------------------------------------

/// Multiplication by a rational on a non-periodic group (p-adically on
/// torsion blocks). Throws UsageError when r is not p-integral at a torsion
/// prime.
Endo multiplication(GroupRef g, const Rational& r);
/// Componentwise multiplication by a J-element on any group's torsion part
/// (torsion-free part annihilated).
Endo multiplication(GroupRef g, const JElement& alpha);
/// n on the cyclic pi-blocks, alpha elsewhere.
Endo semi_multiplication(GroupRef g, const Integer& n, const std::vector<Prime>& pi, const Rational& alpha);
/// n on the cyclic pi-blocks, 0 elsewhere.
Endo mini_multiplication(GroupRef g, const Integer& n, const std::vector<Prime>& pi);
/// Per-prime residues on the cyclic blocks, 0 elsewhere.
Endo mini_multiplication(GroupRef g, const std::map<Prime, Integer>& per_prime);

// -- core operations --------------------------------------------------------

std::vector<std::string> validate(const Endo& phi);
/// Canonical form; requires a valid endo.
Endo normalize(const Endo& phi);
Element apply(const Endo& phi, const Element& x);
Endo add(const Endo& phi, const Endo& psi);
Endo negate(const Endo& phi);
Endo sub(const Endo& phi, const Endo& psi);
/// psi after phi.
Endo compose(const Endo& psi, const Endo& phi);
Endo scale(const Endo& phi, const Integer& n);
bool equal(const Endo& phi, const Endo& psi);
bool close(const Endo& phi, const Endo& psi);

/// Full image of the generator of a cyclic or FreeOmega copy.
Element generator_image(const Endo& phi, const Coord& c);
/// True when no finitary correction is sourced in the block.
bool block_is_exact(const Endo& phi, std::size_t block);

bool is_finitary(const Endo& phi);
bool is_bounded(const Endo& phi);
std::optional<MultValue> is_multiplication(const Endo& phi);
EndoClass classify(const Endo& phi);
std::optional<FmSplit> fm_split(const Endo& phi);

/// Multiplication by a p-local rational on a Prufer coefficient a/p^j.
Rational prufer_scale(const Rational& alpha, const Rational& y, Prime p);
/// p-primary component of y mod 1.
Rational p_primary_part(const Rational& y, Prime p);

}  // namespace endoring
