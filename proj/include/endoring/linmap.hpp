#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "endoring/exactnum.hpp"

namespace endoring {

/// Prime field F_p, or Q when p == 0.
struct Field {
  Prime p = 0;
  bool is_rational() const { return p == 0; }
  bool operator==(const Field&) const = default;
};

using Row = std::vector<Rational>;

/// Square matrix over a field; entries over F_p are kept in [0, p).
/// Acts on column vectors.
struct ExactMatrix {
  Field field;
  std::vector<Row> rows;

  ExactMatrix() = default;
  ExactMatrix(Field f, std::vector<Row> r);
  static ExactMatrix scalar(Field f, std::size_t n, const Rational& lambda);
  std::size_t size() const { return rows.size(); }
  Row apply(const Row& v) const;
  ExactMatrix operator-(const ExactMatrix& o) const;
  ExactMatrix operator+(const ExactMatrix& o) const;
  bool operator==(const ExactMatrix&) const = default;
};

Rational reduce_in(const Field& f, const Rational& x);
/// Rank of the span of the given vectors.
std::size_t rank_of(const Field& f, const std::vector<Row>& vectors);
std::size_t rank(const ExactMatrix& m);

/// Coefficients c_0..c_n of det(xI - M) over Q.
std::vector<Rational> characteristic_polynomial(const ExactMatrix& m);
/// Distinct rational eigenvalues, ascending.
std::vector<Rational> rational_eigenvalues(const ExactMatrix& m);

struct DefectResult {
  std::optional<Rational> lambda;
  std::size_t defect = 0;
  ExactMatrix finitary_part;  // M - lambda I
};

DefectResult scalar_defect(const ExactMatrix& m, bool exclude_zero = false);

/// dim(H + MH) - dim(H) for H spanned by the given vectors.
std::size_t growth(const ExactMatrix& m, const std::vector<Row>& basis);

/// Number of subspaces of F_p^n.
Integer subspace_count(Prime p, std::size_t n);
/// Calls `visit` with an RREF basis of every subspace of F_p^n, by dimension
/// and then lexicographically. Throws UsageError above `budget` subspaces.
void enumerate_subspaces(Prime p, std::size_t n, const std::function<void(const std::vector<Row>&)>& visit,
                         std::uint64_t budget = 1u << 20);

/// Max growth over all subspaces (F_p only).
std::size_t max_inert_codim(const ExactMatrix& m, std::uint64_t budget = 1u << 20);

struct GrowthReport {
  std::size_t trials = 0;
  std::size_t max_observed = 0;
  std::size_t defect = 0;
  std::size_t violations = 0;  // samples with growth above the defect
};

GrowthReport growth_bound_check(const ExactMatrix& m, std::size_t trials, std::uint64_t seed);

}  // namespace endoring
