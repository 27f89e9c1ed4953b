#include "endoring/exactnum.hpp"

#include <algorithm>
#include <cctype>

namespace endoring {

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw UsageError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw UsageError("empty rational literal");
  auto slash = s.find('/');
  auto parse_int = [](const std::string& t) {
    if (t.empty()) throw UsageError("malformed rational literal");
    std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (start == t.size()) throw UsageError("malformed rational literal");
    for (std::size_t i = start; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw UsageError("malformed rational literal '" + t + "'");
    return Integer(t[0] == '+' ? t.substr(1) : t);
  };
  if (slash == std::string::npos) return Rational(parse_int(s));
  return make_rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

std::string to_string(const Integer& x) { return x.get_str(); }

std::string to_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

bool is_prime(Prime n) {
  if (n < 2) return false;
  for (Prime p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  using u128 = unsigned __int128;
  auto mulmod = [n](Prime a, Prime b) { return static_cast<Prime>(static_cast<u128>(a) * b % n); };
  auto powmod = [&](Prime a, Prime e) {
    Prime r = 1;
    a %= n;
    while (e) {
      if (e & 1) r = mulmod(r, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return r;
  };
  Prime d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for all 64-bit n.
  for (Prime a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    Prime x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Integer ipow(const Integer& base, unsigned exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

unsigned valuation(const Integer& n, Prime p) {
  if (n == 0) throw UsageError("valuation of zero");
  Integer m = abs(n);
  Integer pp = to_integer(p);
  unsigned v = 0;
  while (mpz_divisible_p(m.get_mpz_t(), pp.get_mpz_t())) {
    m /= pp;
    ++v;
  }
  return v;
}

std::optional<long> valuation(const Rational& x, Prime p) {
  if (x == 0) return std::nullopt;
  return static_cast<long>(valuation(x.get_num(), p)) - static_cast<long>(valuation(x.get_den(), p));
}

bool is_p_integral(const Rational& x, Prime p) {
  Integer pp = to_integer(p);
  return !mpz_divisible_p(x.get_den().get_mpz_t(), pp.get_mpz_t());
}

bool denominator_within(const Rational& x, const std::vector<Prime>& allowed) {
  Integer d = x.get_den();
  for (Prime p : allowed) {
    Integer pp = to_integer(p);
    while (mpz_divisible_p(d.get_mpz_t(), pp.get_mpz_t())) d /= pp;
  }
  return d == 1;
}

std::vector<Prime> prime_divisors(const Integer& n) {
  if (n == 0) throw UsageError("prime divisors of zero");
  Integer m = abs(n);
  std::vector<Prime> out;
  for (unsigned long p = 2; p < 100000 && m > 1; ++p) {
    if (p * p > 100000 && m < Integer(p) * Integer(p)) break;
    if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      out.push_back(p);
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) m /= p;
    }
  }
  if (m > 1) {
    if (!m.fits_ulong_p() || !is_prime(m.get_ui())) throw UnsupportedError("cannot factor " + m.get_str());
    out.push_back(m.get_ui());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::pair<Prime, unsigned>> prime_power(const Integer& modulus) {
  if (modulus < 2) return std::nullopt;
  auto primes = prime_divisors(modulus);
  if (primes.size() != 1) return std::nullopt;
  return std::make_pair(primes[0], valuation(modulus, primes[0]));
}

Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

std::optional<Integer> mod_inverse(const Integer& a, const Integer& m) {
  if (m == 1) return Integer(0);
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
  return mod_floor(r, m);
}

Integer rational_mod(const Rational& x, const Integer& m) {
  if (m == 1) return Integer(0);
  auto inv = mod_inverse(x.get_den(), m);
  if (!inv) throw UsageError("denominator not invertible modulo " + m.get_str());
  return mod_floor(x.get_num() * *inv, m);
}

Residue::Residue(Integer v, Prime p, unsigned k) : value(std::move(v)), prime(p), exponent(k) {
  if (k < 1) throw UsageError("residue exponent must be >= 1");
  value = mod_floor(value, modulus());
}

Residue operator+(const Residue& a, const Residue& b) {
  if (a.prime != b.prime || a.exponent != b.exponent) throw UsageError("residue modulus mismatch");
  return Residue(a.value + b.value, a.prime, a.exponent);
}

Residue operator*(const Residue& a, const Residue& b) {
  if (a.prime != b.prime || a.exponent != b.exponent) throw UsageError("residue modulus mismatch");
  return Residue(a.value * b.value, a.prime, a.exponent);
}

PLocalRational::PLocalRational(Prime p, Rational value) : p_(p), value_(std::move(value)) {
  value_.canonicalize();
  if (!is_p_integral(value_, p_)) throw UsageError("denominator divisible by p=" + std::to_string(p_));
}

Residue residue_of(const PLocalRational& x, unsigned k) {
  if (k < 1) throw UsageError("residue exponent must be >= 1");
  return Residue(rational_mod(x.value(), ipow(x.prime(), k)), x.prime(), k);
}

std::optional<Residue> crt_solve(const std::vector<Congruence>& congruences) {
  if (congruences.empty()) throw UsageError("crt_solve needs at least one congruence");
  Prime p = 0;
  std::vector<std::pair<unsigned, Integer>> items;
  for (const auto& c : congruences) {
    auto pk = prime_power(c.modulus);
    if (!pk) throw UsageError("modulus " + c.modulus.get_str() + " is not a prime power");
    if (p == 0) p = pk->first;
    if (pk->first != p) throw UsageError("crt_solve: mixed primes");
    items.emplace_back(pk->second, mod_floor(c.residue, c.modulus));
  }
  auto top = *std::max_element(items.begin(), items.end(),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [k, r] : items) {
    if (mod_floor(top.second - r, ipow(p, k)) != 0) return std::nullopt;
  }
  return Residue(top.second, p, top.first);
}

Integer crt_coprime(const std::vector<Congruence>& congruences) {
  Integer x = 0;
  Integer m = 1;
  for (const auto& c : congruences) {
    if (c.modulus == 1) continue;
    // x + m*t == r (mod c.modulus)
    auto inv = mod_inverse(m, c.modulus);
    if (!inv) throw UsageError("crt_coprime: moduli not coprime");
    Integer t = mod_floor((c.residue - x) * *inv, c.modulus);
    x += m * t;
    m *= c.modulus;
    x = mod_floor(x, m);
  }
  return x;
}

JElement::JElement(Integer default_value, std::map<Prime, Rational> exceptions)
    : default_(std::move(default_value)), exceptions_(std::move(exceptions)) {
  for (const auto& [p, v] : exceptions_)
    if (!is_p_integral(v, p)) throw UsageError("J-element component not p-integral");
  canonicalize();
}

Rational JElement::at(Prime p) const {
  auto it = exceptions_.find(p);
  return it == exceptions_.end() ? Rational(default_) : it->second;
}

void JElement::canonicalize() {
  for (auto it = exceptions_.begin(); it != exceptions_.end();) {
    if (it->second == Rational(default_))
      it = exceptions_.erase(it);
    else
      ++it;
  }
}

namespace {
template <typename Op>
JElement combine(const JElement& a, const JElement& b, Op op) {
  std::set<Prime> primes;
  for (const auto& [p, v] : a.exceptions()) primes.insert(p);
  for (const auto& [p, v] : b.exceptions()) primes.insert(p);
  std::map<Prime, Rational> ex;
  for (Prime p : primes) ex[p] = op(a.at(p), b.at(p));
  Integer d = Rational(op(Rational(a.default_value()), Rational(b.default_value()))).get_num();
  return JElement(d, std::move(ex));
}
}  // namespace

JElement operator+(const JElement& a, const JElement& b) {
  return combine(a, b, [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

JElement operator*(const JElement& a, const JElement& b) {
  return combine(a, b, [](const Rational& x, const Rational& y) { return Rational(x * y); });
}

JElement JElement::operator-() const {
  std::map<Prime, Rational> ex;
  for (const auto& [p, v] : exceptions_) ex[p] = -v;
  return JElement(-default_, std::move(ex));
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

struct SnfWork {
  IntMatrix d, u, v;
  bool track;

  void row_sub(std::size_t target, std::size_t src, const Integer& q) {
    for (std::size_t j = 0; j < d.cols(); ++j) d(target, j) -= q * d(src, j);
    if (track)
      for (std::size_t j = 0; j < u.cols(); ++j) u(target, j) -= q * u(src, j);
  }
  void col_sub(std::size_t target, std::size_t src, const Integer& q) {
    for (std::size_t i = 0; i < d.rows(); ++i) d(i, target) -= q * d(i, src);
    if (track)
      for (std::size_t i = 0; i < v.rows(); ++i) v(i, target) -= q * v(i, src);
  }
  void swap_rows(std::size_t a, std::size_t b) {
    d.swap_rows(a, b);
    if (track) u.swap_rows(a, b);
  }
  void swap_cols(std::size_t a, std::size_t b) {
    d.swap_cols(a, b);
    if (track) v.swap_cols(a, b);
  }
};

SmithForm run_snf(const IntMatrix& m, bool track) {
  const std::size_t rows = m.rows(), cols = m.cols();
  SnfWork w{m, track ? IntMatrix::identity(rows) : IntMatrix(), track ? IntMatrix::identity(cols) : IntMatrix(),
            track};
  std::size_t t = 0;
  for (; t < std::min(rows, cols); ++t) {
    bool found_any = false;
    while (true) {
      // pivot: smallest nonzero absolute value in the trailing block
      std::size_t pi = rows, pj = cols;
      Integer best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          const Integer& x = w.d(i, j);
          if (x == 0) continue;
          if (pi == rows || abs(x) < best) {
            best = abs(x);
            pi = i;
            pj = j;
          }
        }
      if (pi == rows) break;
      found_any = true;
      w.swap_rows(t, pi);
      w.swap_cols(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (w.d(i, t) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), w.d(i, t).get_mpz_t(), w.d(t, t).get_mpz_t());
        w.row_sub(i, t, q);
        if (w.d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (w.d(t, j) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), w.d(t, j).get_mpz_t(), w.d(t, t).get_mpz_t());
        w.col_sub(j, t, q);
        if (w.d(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (!mpz_divisible_p(w.d(i, j).get_mpz_t(), w.d(t, t).get_mpz_t())) {
            // fold row i into row t and re-pivot
            w.row_sub(t, i, Integer(-1));
            divides = false;
            break;
          }
        }
      if (divides) break;
    }
    if (!found_any) break;
    if (w.d(t, t) < 0) {
      for (std::size_t j = 0; j < cols; ++j) w.d(t, j) = -w.d(t, j);
      if (track)
        for (std::size_t j = 0; j < rows; ++j) w.u(t, j) = -w.u(t, j);
    }
  }
  SmithForm out;
  out.rank = t;
  out.d = std::move(w.d);
  out.u = std::move(w.u);
  out.v = std::move(w.v);
  return out;
}

}  // namespace

SmithForm snf(const IntMatrix& m) { return run_snf(m, true); }

std::vector<Integer> smith_invariants(const IntMatrix& m) {
  auto f = run_snf(m, false);
  std::vector<Integer> out;
  for (std::size_t i = 0; i < f.rank; ++i) out.push_back(f.d(i, i));
  return out;
}

IntMatrix integer_kernel(const IntMatrix& m) {
  auto f = snf(m);
  IntMatrix k(m.cols(), m.cols() - f.rank);
  for (std::size_t c = f.rank; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.cols(); ++r) k(r, c - f.rank) = f.v(r, c);
  return k;
}

}  // namespace endoring
