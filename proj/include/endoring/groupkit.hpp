#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "endoring/exactnum.hpp"

namespace endoring {

/// Finite count or the countable infinity omega (nullopt).
using Cardinal = std::optional<std::uint64_t>;
inline constexpr Cardinal kOmega = std::nullopt;

/// Exponent bound in the naturals extended by infinity (nullopt).
using Bound = std::optional<unsigned>;
inline constexpr Bound kInfinite = std::nullopt;

std::string to_string(const Cardinal& c);

enum class BlockKind { Cyclic, Prufer, TorsionFree, FreeOmega };

/// One summand family of the symbolic group:
///   Cyclic       Z(p^k)^(mult)
///   Prufer       Z(p^inf)^(mult)
///   TorsionFree  (Q^pi)^rank, rank finite; pi = {} models Z
///   FreeOmega    Z^(omega), the single marker for infinite torsion-free rank
struct Block {
  std::string name;
  BlockKind kind = BlockKind::Cyclic;
  Prime p = 0;
  unsigned k = 0;
  Cardinal mult = 1;
  std::vector<Prime> pi;

  static Block cyclic(std::string name, Prime p, unsigned k, Cardinal mult);
  static Block prufer(std::string name, Prime p, Cardinal copies);
  static Block torsion_free(std::string name, std::vector<Prime> pi, std::uint64_t rank);
  static Block free_omega(std::string name);

  bool is_torsion() const { return kind == BlockKind::Cyclic || kind == BlockKind::Prufer; }
  bool is_torsion_free() const { return kind == BlockKind::TorsionFree || kind == BlockKind::FreeOmega; }
  bool has_prime_in_pi(Prime q) const;
  bool operator==(const Block&) const = default;
};

struct GroupDesc {
  std::string name;
  std::vector<Block> blocks;

  /// Throws UsageError on duplicate names, non-prime p, k = 0, zero
  /// multiplicities, or more than one FreeOmega block.
  void validate() const;
  std::optional<std::size_t> find(const std::string& block_name) const;
  std::size_t index_of(const std::string& block_name) const;

  bool is_periodic() const;
  bool has_ftfr() const;
  bool is_finite() const;
  /// Primes carried by any block (torsion primes and torsion-free pi sets).
  std::vector<Prime> primes() const;
  bool operator==(const GroupDesc&) const = default;
};

struct Coord {
  std::uint32_t block = 0;
  std::uint64_t copy = 0;
  auto operator<=>(const Coord&) const = default;
};

/// Finitely supported element. Coefficients: cyclic -> integer in
/// [0, p^k); Prufer -> a/p^j in [0, 1); torsion-free -> rational with
/// pi-denominator (integer on FreeOmega copies).
struct Element {
  std::map<Coord, Rational> coeffs;
  bool is_zero() const { return coeffs.empty(); }
  bool operator==(const Element&) const = default;
};

/// Reduces a raw coefficient into its block's domain; throws UsageError if
/// the value is not admissible there.
Rational normalize_coefficient(const GroupDesc& g, const Coord& c, const Rational& value);
bool coefficient_admissible(const GroupDesc& g, const Coord& c, const Rational& value);
Element make_element(const GroupDesc& g, const std::map<Coord, Rational>& raw);
Element unit_element(const GroupDesc& g, const Coord& c);
Element prufer_element(const GroupDesc& g, const Coord& c, unsigned depth);

Element element_add(const GroupDesc& g, const Element& x, const Element& y);
Element element_neg(const GroupDesc& g, const Element& x);
Element element_sub(const GroupDesc& g, const Element& x, const Element& y);
Element element_scale(const GroupDesc& g, const Element& x, const Integer& n);
/// Additive order; nullopt when the element has infinite order.
std::optional<Integer> element_order(const GroupDesc& g, const Element& x);
bool element_is_torsion(const GroupDesc& g, const Element& x);
std::string to_string(const GroupDesc& g, const Element& x);

// ---------------------------------------------------------------------------
// Invariants

/// Possibly cofinite set of primes: all primes when default_member, minus
/// the (sorted) exceptions; otherwise exactly the exceptions.
struct PrimeSelector {
  bool default_member = false;
  std::vector<Prime> exceptions;

  static PrimeSelector finite(std::vector<Prime> primes);
  static PrimeSelector cofinite(std::vector<Prime> excluded);
  bool contains(Prime p) const;
  bool is_empty() const { return !default_member && exceptions.empty(); }
  bool operator==(const PrimeSelector&) const = default;
};

struct PrimeInvariants {
  unsigned max_k = 0;      // bound exponent of the cyclic part
  unsigned eps_k = 0;      // max k over omega-multiplicity cyclic blocks
  bool omega_cyclic = false;
  Cardinal d = 0;          // Prufer copies
  std::uint64_t s_rank = 0;  // torsion-free rank that is p-divisible
  Bound e = 0;
  Bound eps = 0;
  unsigned c = 0;
  bool critical = false;
  bool operator==(const PrimeInvariants&) const = default;
};

struct Invariants {
  Cardinal r0 = 0;
  std::map<Prime, PrimeInvariants> primes;
  PrimeSelector pi0;
  PrimeSelector pi_star;
  PrimeSelector pi_c;

  /// Per-prime data; all-zero for primes the group does not involve.
  PrimeInvariants at(Prime p) const;
  bool operator==(const Invariants&) const = default;
};

Invariants invariants(const GroupDesc& a);

struct HBounds {
  Bound e;
  Bound eps;
  bool operator==(const HBounds&) const = default;
};
using HDescriptor = std::map<Prime, HBounds>;

struct HElement {
  JElement value;
  HDescriptor descriptor;
};

HDescriptor h_descriptor(const GroupDesc& a);
bool h_equal(const HElement& x, const HElement& y);
HElement h_add(const HElement& x, const HElement& y);
HElement h_mul(const HElement& x, const HElement& y);

using NMType = std::map<Prime, unsigned>;
NMType nm_type(const GroupDesc& a);

// ---------------------------------------------------------------------------
// Finite truncations

/// Level-N finite stand-in for a group.
///  - omega multiplicities become N copies;
///  - Prufer(p, c) becomes Cyclic(p, depth, c), the p^{-depth} layer of each
///    copy, where depth = max(N, min_prufer_depth);
///  - torsion-free blocks are dropped, or with a sampling prime q become the
///    quotient Cyclic(q, N, rank) of Q^pi / q^N Q^pi (only for q not in pi).
/// The truncated group keeps block names; `source_block[i]` is the index of
/// the original block that produced truncated block i.
struct Truncation {
  GroupDesc group;
  unsigned level = 1;
  unsigned prufer_depth = 1;
  std::optional<Prime> sampling_prime;
  std::vector<std::size_t> source_block;

  /// Maps an element of the truncated group into the original group:
  /// layer embedding on Prufer coordinates, identity elsewhere. Defined
  /// only when no torsion-free quotient coordinates are involved.
  Element lift(const Element& truncated, const GroupDesc& original) const;
  /// Inverse of lift on elements lying inside the truncated layer.
  std::optional<Element> restrict(const Element& x, const GroupDesc& original) const;
};

Truncation truncate(const GroupDesc& a, unsigned level, std::optional<Prime> sampling_prime = std::nullopt,
                    unsigned min_prufer_depth = 0);

Integer finite_order(const GroupDesc& finite_group);

}  // namespace endoring
