#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace endoring {

using Integer = mpz_class;
using Rational = mpq_class;
using Prime = std::uint64_t;

/// Caller supplied inputs that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs outside the representable model (e.g. groups without finite
/// torsion-free rank where the operation needs it).
class UnsupportedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Integers and rationals

Rational make_rational(const Integer& num, const Integer& den);
Rational parse_rational(std::string_view text);
std::string to_string(const Integer& x);
std::string to_string(const Rational& x);

bool is_prime(Prime n);
Integer ipow(const Integer& base, unsigned exp);
inline Integer ipow(Prime p, unsigned exp) { return ipow(Integer(static_cast<unsigned long>(p)), exp); }
inline Integer to_integer(Prime p) { return Integer(static_cast<unsigned long>(p)); }

/// p-adic valuation of a nonzero integer.
unsigned valuation(const Integer& n, Prime p);
/// p-adic valuation of a rational; nullopt for zero.
std::optional<long> valuation(const Rational& x, Prime p);
bool is_p_integral(const Rational& x, Prime p);
/// True iff every prime divisor of the denominator lies in `allowed`.
bool denominator_within(const Rational& x, const std::vector<Prime>& allowed);

/// Prime divisors of |n| (n != 0), ascending. Trial division plus a final
/// primality check; throws UnsupportedError for cofactors it cannot split.
std::vector<Prime> prime_divisors(const Integer& n);

/// Exponent k if modulus == p^k for a prime p, else nullopt.
std::optional<std::pair<Prime, unsigned>> prime_power(const Integer& modulus);

/// Least non-negative representative.
Integer mod_floor(const Integer& a, const Integer& m);
std::optional<Integer> mod_inverse(const Integer& a, const Integer& m);

/// num * den^{-1} mod m; den must be invertible mod m.
Integer rational_mod(const Rational& x, const Integer& m);

// ---------------------------------------------------------------------------
// Residues and p-local rationals

struct Residue {
  Integer value;
  Prime prime = 2;
  unsigned exponent = 1;

  Residue() = default;
  Residue(Integer v, Prime p, unsigned k);
  Integer modulus() const { return ipow(prime, exponent); }
  bool operator==(const Residue& o) const {
    return prime == o.prime && exponent == o.exponent && value == o.value;
  }
};

Residue operator+(const Residue& a, const Residue& b);
Residue operator*(const Residue& a, const Residue& b);

/// A rational whose denominator is prime to p; exact stand-in for a p-adic
/// integer.
class PLocalRational {
 public:
  PLocalRational(Prime p, Rational value);
  Prime prime() const { return p_; }
  const Rational& value() const { return value_; }
  bool operator==(const PLocalRational& o) const { return p_ == o.p_ && value_ == o.value_; }

 private:
  Prime p_;
  Rational value_;
};

Residue residue_of(const PLocalRational& x, unsigned k);

struct Congruence {
  Integer residue;
  Integer modulus;
};

/// Joint solution of congruences modulo powers of a single prime.
/// Returns the class modulo the largest modulus, or nullopt when two
/// congruences disagree. Throws UsageError for mixed primes.
std::optional<Residue> crt_solve(const std::vector<Congruence>& congruences);

/// Ordinary CRT for pairwise coprime moduli; returns least non-negative x.
Integer crt_coprime(const std::vector<Congruence>& congruences);

// ---------------------------------------------------------------------------
// J = prod_p Z_p restricted to representable elements.

class JElement {
 public:
  JElement() = default;
  explicit JElement(Integer default_value, std::map<Prime, Rational> exceptions = {});

  const Integer& default_value() const { return default_; }
  const std::map<Prime, Rational>& exceptions() const { return exceptions_; }
  Rational at(Prime p) const;

  bool operator==(const JElement& o) const {
    return default_ == o.default_ && exceptions_ == o.exceptions_;
  }

  friend JElement operator+(const JElement& a, const JElement& b);
  friend JElement operator*(const JElement& a, const JElement& b);
  JElement operator-() const;

 private:
  void canonicalize();
  Integer default_;
  std::map<Prime, Rational> exceptions_;
};

inline JElement operator-(const JElement& a, const JElement& b) { return a + (-b); }

// ---------------------------------------------------------------------------
// Dense matrices

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw UsageError("matrix shape mismatch");
    Matrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
      }
    return out;
  }

  Matrix operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw UsageError("matrix shape mismatch");
    Matrix out(*this);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
    return out;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;

struct SmithForm {
  IntMatrix d;
  IntMatrix u;  // unimodular, rows x rows
  IntMatrix v;  // unimodular, cols x cols
  std::size_t rank = 0;
};

/// Smith normal form U*M*V = D with d_i | d_{i+1}, d_i > 0 for i < rank.
SmithForm snf(const IntMatrix& m);
/// Invariant factors only (no transforms); nonzero entries ascending.
std::vector<Integer> smith_invariants(const IntMatrix& m);
/// Basis of the integer kernel {x : M x = 0} as columns.
IntMatrix integer_kernel(const IntMatrix& m);

}  // namespace endoring
