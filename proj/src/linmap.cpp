#include "endoring/linmap.hpp"

#include <algorithm>
#include <random>

namespace endoring {

Rational reduce_in(const Field& f, const Rational& x) {
  if (f.is_rational()) return x;
  Integer p = to_integer(f.p);
  if (x.get_den() % p == 0) throw UsageError("entry not defined in F_" + std::to_string(f.p));
  return Rational(rational_mod(x, p));
}

ExactMatrix::ExactMatrix(Field f, std::vector<Row> r) : field(f), rows(std::move(r)) {
  if (!f.is_rational() && !is_prime(f.p)) throw UsageError("field characteristic must be prime");
  for (auto& row : rows) {
    if (row.size() != rows.size()) throw UsageError("matrix must be square");
    for (auto& x : row) x = reduce_in(field, x);
  }
}

ExactMatrix ExactMatrix::scalar(Field f, std::size_t n, const Rational& lambda) {
  std::vector<Row> r(n, Row(n, 0));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = lambda;
  return ExactMatrix(f, std::move(r));
}

Row ExactMatrix::apply(const Row& v) const {
  Row out(size(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += rows[i][j] * v[j];
    out[i] = reduce_in(field, s);
  }
  return out;
}

ExactMatrix ExactMatrix::operator-(const ExactMatrix& o) const {
  std::vector<Row> r = rows;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) r[i][j] -= o.rows[i][j];
  return ExactMatrix(field, std::move(r));
}

ExactMatrix ExactMatrix::operator+(const ExactMatrix& o) const {
  std::vector<Row> r = rows;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) r[i][j] += o.rows[i][j];
  return ExactMatrix(field, std::move(r));
}

namespace {

std::size_t rank_mod_p(Prime p, const std::vector<Row>& vectors) {
  if (vectors.empty()) return 0;
  const std::size_t n = vectors.front().size();
  std::vector<std::vector<std::uint64_t>> m;
  for (const auto& v : vectors) {
    std::vector<std::uint64_t> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = rational_mod(v[j], to_integer(p)).get_ui();
    m.push_back(std::move(row));
  }
  auto inv = [p](std::uint64_t a) { return mod_inverse(to_integer(a), to_integer(p))->get_ui(); };
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m.size(); ++col) {
    std::size_t piv = r;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[r]);
    std::uint64_t iv = inv(m[r][col]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][col] == 0) continue;
      std::uint64_t f = static_cast<std::uint64_t>(static_cast<unsigned __int128>(m[i][col]) * iv % p);
      for (std::size_t j = col; j < n; ++j)
        m[i][j] = (m[i][j] + p - static_cast<std::uint64_t>(static_cast<unsigned __int128>(f) * m[r][j] % p)) % p;
    }
    ++r;
  }
  return r;
}

std::size_t rank_rational(std::vector<Row> m) {
  if (m.empty()) return 0;
  const std::size_t n = m.front().size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m.size(); ++col) {
    std::size_t piv = r;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      if (m[i][col] == 0) continue;
      Rational f = m[i][col] / m[r][col];
      for (std::size_t j = col; j < n; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

Rational eval(const std::vector<Rational>& c, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

}  // namespace

std::size_t rank_of(const Field& f, const std::vector<Row>& vectors) {
  return f.is_rational() ? rank_rational(vectors) : rank_mod_p(f.p, vectors);
}

std::size_t rank(const ExactMatrix& m) { return rank_of(m.field, m.rows); }

std::vector<Rational> characteristic_polynomial(const ExactMatrix& m) {
  // Faddeev-LeVerrier
  const std::size_t n = m.size();
  std::vector<Rational> c(n + 1, 0);
  c[n] = 1;
  std::vector<Row> mk(n, Row(n, 0));
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<Row> next(n, Row(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational s = 0;
        for (std::size_t t = 0; t < n; ++t) s += m.rows[i][t] * mk[t][j];
        next[i][j] = s + (i == j ? c[n - k + 1] : Rational(0));
      }
    mk = std::move(next);
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < n; ++t) tr += m.rows[i][t] * mk[t][i];
    c[n - k] = -tr / Rational(static_cast<long>(k));
  }
  return c;
}

std::vector<Rational> rational_eigenvalues(const ExactMatrix& m) {
  if (!m.field.is_rational()) throw UsageError("rational eigenvalues need a matrix over Q");
  const std::size_t n = m.size();
  if (n == 0) return {};
  // integer matrix d*M: rational eigenvalues become integer roots of a monic polynomial
  Integer d = 1;
  for (const auto& row : m.rows)
    for (const auto& x : row) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den().get_mpz_t());
  ExactMatrix scaled = m;
  Integer bound = 0;
  for (auto& row : scaled.rows) {
    Integer s = 0;
    for (auto& x : row) {
      x *= Rational(d);
      s += abs(x.get_num());
    }
    bound = std::max(bound, s);
  }
  std::vector<Rational> c = characteristic_polynomial(scaled);
  std::vector<Rational> out;
  std::size_t low = 0;
  while (low < c.size() && c[low] == 0) ++low;
  if (low > 0) out.push_back(0);
  Integer c0 = abs(c[low].get_num());
  std::vector<Integer> candidates;
  if (bound <= 200000) {
    for (Integer y = 1; y <= bound; ++y)
      if (mpz_divisible_p(c0.get_mpz_t(), y.get_mpz_t())) candidates.push_back(y);
  } else {
    std::vector<Integer> divs{1};
    Integer rest = c0;
    for (Prime q : prime_divisors(c0)) {
      unsigned e = valuation(c0, q);
      std::vector<Integer> more;
      for (const auto& dv : divs)
        for (unsigned i = 1; i <= e; ++i) more.push_back(dv * ipow(q, i));
      divs.insert(divs.end(), more.begin(), more.end());
    }
    for (const auto& dv : divs)
      if (dv <= bound) candidates.push_back(dv);
  }
  for (const auto& y : candidates)
    for (int sign : {1, -1}) {
      Rational mu(Integer(y * sign));
      if (eval(c, mu) == 0) out.push_back(mu / Rational(d));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DefectResult scalar_defect(const ExactMatrix& m, bool exclude_zero) {
  std::vector<Rational> candidates;
  if (m.field.is_rational()) {
    candidates = rational_eigenvalues(m);
    if (std::find(candidates.begin(), candidates.end(), Rational(0)) == candidates.end()) candidates.push_back(0);
    std::sort(candidates.begin(), candidates.end());
  } else {
    for (Prime x = 0; x < m.field.p; ++x) candidates.push_back(Rational(Integer(static_cast<unsigned long>(x))));
  }
  if (exclude_zero) std::erase(candidates, Rational(0));
  DefectResult best{std::nullopt, m.size(), m};
  for (const auto& lam : candidates) {
    ExactMatrix diff = m - ExactMatrix::scalar(m.field, m.size(), lam);
    std::size_t r = rank(diff);
    if (!best.lambda || r < best.defect) best = DefectResult{lam, r, diff};
  }
  return best;
}

std::size_t growth(const ExactMatrix& m, const std::vector<Row>& basis) {
  std::vector<Row> all = basis;
  for (const auto& v : basis) all.push_back(m.apply(v));
  return rank_of(m.field, all) - rank_of(m.field, basis);
}

Integer subspace_count(Prime p, std::size_t n) {
  // sum of Gaussian binomials [n choose k]_p
  Integer total = 0;
  const Integer q = to_integer(p);
  for (std::size_t k = 0; k <= n; ++k) {
    Integer num = 1, den = 1;
    for (std::size_t i = 0; i < k; ++i) {
      num *= ipow(q, static_cast<unsigned>(n - i)) - 1;
      den *= ipow(q, static_cast<unsigned>(i + 1)) - 1;
    }
    total += num / den;
  }
  return total;
}

void enumerate_subspaces(Prime p, std::size_t n, const std::function<void(const std::vector<Row>&)>& visit,
                         std::uint64_t budget) {
  if (!is_prime(p)) throw UsageError("subspace enumeration needs a prime field");
  if (subspace_count(p, n) > Integer(static_cast<unsigned long>(budget)))
    throw UsageError("subspace enumeration budget exceeded");
  for (std::size_t d = 0; d <= n; ++d) {
    std::vector<std::size_t> pivots(d);
    for (std::size_t i = 0; i < d; ++i) pivots[i] = i;
    while (true) {
      std::vector<std::pair<std::size_t, std::size_t>> free;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = pivots[i] + 1; j < n; ++j)
          if (!std::binary_search(pivots.begin(), pivots.end(), j)) free.emplace_back(i, j);
      std::vector<Prime> digits(free.size(), 0);
      while (true) {
        std::vector<Row> basis(d, Row(n, 0));
        for (std::size_t i = 0; i < d; ++i) basis[i][pivots[i]] = 1;
        for (std::size_t t = 0; t < free.size(); ++t)
          basis[free[t].first][free[t].second] = Rational(Integer(static_cast<unsigned long>(digits[t])));
        visit(basis);
        std::size_t t = free.size();
        while (t > 0 && digits[t - 1] == p - 1) digits[--t] = 0;
        if (t == 0) break;
        ++digits[t - 1];
      }
      // next pivot combination
      std::size_t i = d;
      while (i > 0 && pivots[i - 1] == n - d + i - 1) --i;
      if (i == 0) break;
      ++pivots[i - 1];
      for (std::size_t j = i; j < d; ++j) pivots[j] = pivots[j - 1] + 1;
    }
  }
}

std::size_t max_inert_codim(const ExactMatrix& m, std::uint64_t budget) {
  if (m.field.is_rational()) throw UsageError("exhaustive enumeration needs a finite field");
  std::size_t best = 0;
  enumerate_subspaces(
      m.field.p, m.size(), [&](const std::vector<Row>& basis) { best = std::max(best, growth(m, basis)); }, budget);
  return best;
}

GrowthReport growth_bound_check(const ExactMatrix& m, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GrowthReport rep;
  rep.trials = trials;
  rep.defect = scalar_defect(m).defect;
  const std::size_t n = m.size();
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t d = n == 0 ? 0 : rng() % (n + 1);
    std::vector<Row> basis;
    for (std::size_t i = 0; i < d; ++i) {
      Row v(n);
      for (auto& x : v) {
        long raw = m.field.is_rational() ? static_cast<long>(rng() % 7) - 3 : static_cast<long>(rng() % m.field.p);
        x = Rational(raw);
      }
      basis.push_back(std::move(v));
    }
    std::size_t g = growth(m, basis);
    rep.max_observed = std::max(rep.max_observed, g);
    if (g > rep.defect) ++rep.violations;
  }
  return rep;
}

}  // namespace endoring
