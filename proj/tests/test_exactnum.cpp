#include <doctest.h>

#include <random>

#include "endoring/exactnum.hpp"

using namespace endoring;

namespace {

IntMatrix mat(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

Integer det(IntMatrix m) {
  const std::size_t n = m.rows();
  RatMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Rational(m(i, j));
  Rational d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      a.swap_rows(p, c);
      d = -d;
    }
    d *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      Rational f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return d.get_num();
}

void check_snf(const IntMatrix& m) {
  SmithForm s = snf(m);
  CHECK(s.u * m * s.v == s.d);
  CHECK(abs(det(s.u)) == 1);
  CHECK(abs(det(s.v)) == 1);
  for (std::size_t i = 0; i + 1 < s.rank; ++i) CHECK(s.d(i + 1, i + 1) % s.d(i, i) == 0);
}

}  // namespace

TEST_CASE("crt_solve examples") {
  auto a = crt_solve({{1, 2}, {3, 4}});
  REQUIRE(a);
  CHECK(a->value == 3);
  CHECK(a->modulus() == 4);
  CHECK_FALSE(crt_solve({{0, 3}, {1, 9}}));
  auto b = crt_solve({{2, 9}, {2, 3}});
  REQUIRE(b);
  CHECK(b->value == 2);
  CHECK(b->modulus() == 9);
  CHECK_THROWS_AS(crt_solve({{1, 2}, {1, 3}}), UsageError);
}

TEST_CASE("crt_solve agrees with pairwise consistency") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    Prime p = (t % 2) ? 2 : 3;
    std::vector<Congruence> cs;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      Integer m = ipow(p, 1 + static_cast<unsigned>(rng() % 3));
      cs.push_back({Integer(static_cast<unsigned long>(rng() % 30)), m});
    }
    bool consistent = true;
    for (const auto& x : cs)
      for (const auto& y : cs) {
        Integer m = x.modulus < y.modulus ? x.modulus : y.modulus;
        if (mod_floor(x.residue - y.residue, m) != 0) consistent = false;
      }
    auto r = crt_solve(cs);
    CHECK(r.has_value() == consistent);
    if (r)
      for (const auto& c : cs) CHECK(mod_floor(r->value - c.residue, c.modulus) == 0);
  }
}

TEST_CASE("snf examples") {
  IntMatrix m = mat({{2, 0}, {0, 3}});
  SmithForm s = snf(m);
  CHECK(s.d == mat({{1, 0}, {0, 6}}));
  check_snf(m);
  CHECK(snf(IntMatrix::identity(3)).d == IntMatrix::identity(3));
  CHECK(snf(mat({{1, 1}, {1, 2}})).d == IntMatrix::identity(2));
  CHECK(snf(IntMatrix(0, 0)).d.rows() == 0);
}

TEST_CASE("snf on random matrices") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = static_cast<long>(rng() % 21) - 10;
    check_snf(m);
    if (r == c) {
      SmithForm s = snf(m);
      Integer prod = 1;
      for (std::size_t i = 0; i < r; ++i) prod *= s.d(i, i);
      CHECK(abs(prod) == abs(det(m)));
    }
  }
}

TEST_CASE("residue_of examples") {
  CHECK(residue_of(PLocalRational(3, make_rational(1, 2)), 2).value == 5);
  CHECK(residue_of(PLocalRational(2, make_rational(3, 5)), 3).value == 7);
  CHECK(residue_of(PLocalRational(5, 0), 4).value == 0);
  CHECK_THROWS_AS(PLocalRational(3, make_rational(1, 3)), UsageError);
}

TEST_CASE("residue_of is compatible across exponents") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    Prime p = (t % 3 == 0) ? 2 : (t % 3 == 1 ? 3 : 5);
    long den = 1 + static_cast<long>(rng() % 20);
    while (den % static_cast<long>(p) == 0) ++den;
    Rational x = make_rational(Integer(static_cast<long>(rng() % 200) - 100), Integer(den));
    unsigned k = 1 + static_cast<unsigned>(rng() % 4), k2 = k + static_cast<unsigned>(rng() % 3);
    Integer a = residue_of(PLocalRational(p, x), k).value;
    Integer b = residue_of(PLocalRational(p, x), k2).value;
    CHECK(mod_floor(a - b, ipow(p, k)) == 0);
  }
}

TEST_CASE("JElement ring axioms") {
  std::mt19937_64 rng(5);
  auto rnd = [&] {
    std::map<Prime, Rational> ex;
    for (Prime p : {2, 3, 5})
      if (rng() % 2) ex[p] = make_rational(Integer(static_cast<long>(rng() % 9) - 4), Integer(p == 2 ? 3 : 2));
    return JElement(Integer(static_cast<long>(rng() % 9) - 4), ex);
  };
  for (int t = 0; t < 200; ++t) {
    JElement a = rnd(), b = rnd(), c = rnd();
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK(a - a == JElement(0));
  }
  JElement x(1, {{2, Rational(1)}});
  CHECK(x.exceptions().empty());
}

TEST_CASE("rational helpers") {
  CHECK(parse_rational("-6/4") == make_rational(-3, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), UsageError);
  CHECK(is_prime(2));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
  CHECK(is_prime(1000003));
  CHECK(rational_mod(make_rational(1, 2), 9) == 5);
  CHECK(*valuation(make_rational(12, 5), 2) == 2);
  CHECK(prime_divisors(360) == std::vector<Prime>{2, 3, 5});
  CHECK(prime_power(27) == std::make_pair(Prime(3), 3u));
  CHECK_FALSE(prime_power(12));
}
