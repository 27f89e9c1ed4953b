#pragma once

#include <cstdint>
#include <vector>

#include "endoring/endokit.hpp"

namespace endoring::plocal {

using Vec = std::vector<std::uint64_t>;

/// Arithmetic in Z/p^E, p^E < 2^62.
class ChainRing {
 public:
  ChainRing(Prime p, unsigned exponent);
  Prime p() const { return p_; }
  unsigned exponent() const { return e_; }
  std::uint64_t modulus() const { return q_; }
  std::uint64_t pow(unsigned k) const { return pows_.at(k); }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t reduce(const Integer& x) const;
  /// exponent() for zero.
  unsigned valuation(std::uint64_t a) const;
  std::uint64_t unit_inverse(std::uint64_t u) const;

 private:
  Prime p_;
  unsigned e_;
  std::uint64_t q_;
  std::vector<std::uint64_t> pows_;
};

struct Triangular {
  std::vector<Vec> pivots;
  std::vector<unsigned> pivot_valuations;
  std::vector<Vec> residual;  // rows whose first `pivot_cols` entries vanished
};

/// Column-by-column elimination over the first pivot_cols entries. The
/// pivots plus residual rows generate the same module as the input; the
/// residual rows generate its intersection with {first pivot_cols = 0}.
Triangular triangularize(const ChainRing& R, std::vector<Vec> rows, std::size_t pivot_cols);

/// log_p of the order of the submodule generated by rows.
unsigned log_order(const ChainRing& R, const std::vector<Vec>& rows, std::size_t ncols);

/// Row vectors z with z * M = 0, as generators.
std::vector<Vec> left_kernel(const ChainRing& R, const std::vector<Vec>& m, std::size_t ncols);

/// p-primary part of a finite group (all blocks Cyclic with finite
/// multiplicity) embedded in (Z/p^E)^n by scaling coordinate i by p^{E-k_i}.
struct PrimaryModel {
  Prime p = 2;
  std::vector<Coord> coords;
  std::vector<unsigned> k;
  ChainRing ring{2, 1};

  Vec embed(const Element& x) const;
  Element extract(const GroupDesc& g, const Vec& v) const;
  std::size_t dim() const { return coords.size(); }
};

/// Endomorphism of a finite group restricted to one primary part:
/// images[i] = embedded image of the unit of coordinate i.
struct PrimaryMap {
  const PrimaryModel* model = nullptr;
  std::vector<Vec> images;
  Vec apply(const Vec& y) const;
};

struct FiniteModel {
  GroupRef group;
  std::vector<PrimaryModel> parts;

  explicit FiniteModel(GroupRef finite_group);
  /// Embedded generators per primary part.
  std::vector<std::vector<Vec>> split(const std::vector<Element>& gens) const;
};

std::vector<PrimaryMap> primary_maps(const FiniteModel& m, const Endo& phi);

/// log_p |H + phi H : H| for each primary part, combined into the index.
Integer index_in_sum(const FiniteModel& m, const std::vector<PrimaryMap>& maps, const std::vector<Element>& gens);

/// |X^* / X_*| with X^* the phi-closure and X_* the largest phi-invariant
/// subgroup of X.
Integer fs_ratio(const FiniteModel& m, const std::vector<PrimaryMap>& maps, const std::vector<Element>& gens);

}  // namespace endoring::plocal
