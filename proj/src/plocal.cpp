#include "endoring/plocal.hpp"

#include <algorithm>

namespace endoring::plocal {

ChainRing::ChainRing(Prime p, unsigned exponent) : p_(p), e_(exponent) {
  if (exponent == 0) throw UsageError("chain ring exponent must be >= 1");
  pows_.push_back(1);
  for (unsigned i = 0; i < exponent; ++i) {
    unsigned __int128 next = static_cast<unsigned __int128>(pows_.back()) * p;
    if (next >= (static_cast<unsigned __int128>(1) << 62)) throw UnsupportedError("p^E too large for the chain ring");
    pows_.push_back(static_cast<std::uint64_t>(next));
  }
  q_ = pows_.back();
}

std::uint64_t ChainRing::add(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t s = a + b;
  return s >= q_ ? s - q_ : s;
}

std::uint64_t ChainRing::sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + q_ - b; }

std::uint64_t ChainRing::mul(std::uint64_t a, std::uint64_t b) const {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q_);
}

std::uint64_t ChainRing::reduce(const Integer& x) const {
  Integer r = mod_floor(x, Integer(static_cast<unsigned long>(q_)));
  return r.get_ui();
}

unsigned ChainRing::valuation(std::uint64_t a) const {
  if (a == 0) return e_;
  unsigned v = 0;
  while (a % p_ == 0) {
    a /= p_;
    ++v;
  }
  return v;
}

std::uint64_t ChainRing::unit_inverse(std::uint64_t u) const {
  __int128 r0 = static_cast<__int128>(q_), r1 = static_cast<__int128>(u % q_);
  __int128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    __int128 qt = r0 / r1;
    __int128 tmp = r0 - qt * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - qt * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 != 1) throw UsageError("not a unit in the chain ring");
  __int128 m = static_cast<__int128>(q_);
  return static_cast<std::uint64_t>(((t0 % m) + m) % m);
}

namespace {

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](std::uint64_t x) { return x == 0; });
}

Vec scaled(const ChainRing& R, const Vec& v, std::uint64_t f) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = R.mul(v[i], f);
  return out;
}

}  // namespace

Triangular triangularize(const ChainRing& R, std::vector<Vec> rows, std::size_t pivot_cols) {
  Triangular out;
  std::erase_if(rows, is_zero);
  for (std::size_t col = 0; col < pivot_cols && !rows.empty(); ++col) {
    std::size_t best = rows.size();
    unsigned best_v = R.exponent();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      unsigned v = R.valuation(rows[i][col]);
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    if (best == rows.size()) continue;
    Vec pivot = std::move(rows[best]);
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
    const std::uint64_t pv = R.pow(best_v);
    const std::uint64_t uinv = R.unit_inverse(pivot[col] / pv);
    for (auto& row : rows) {
      if (row[col] == 0) continue;
      std::uint64_t f = R.mul(row[col] / pv, uinv);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = R.sub(row[j], R.mul(f, pivot[j]));
    }
    Vec annihilated = scaled(R, pivot, R.pow(R.exponent() - best_v));
    if (!is_zero(annihilated)) rows.push_back(std::move(annihilated));
    std::erase_if(rows, is_zero);
    out.pivots.push_back(std::move(pivot));
    out.pivot_valuations.push_back(best_v);
  }
  out.residual = std::move(rows);
  return out;
}

unsigned log_order(const ChainRing& R, const std::vector<Vec>& rows, std::size_t ncols) {
  Triangular t = triangularize(R, rows, ncols);
  unsigned total = 0;
  for (unsigned v : t.pivot_valuations) total += R.exponent() - v;
  return total;
}

std::vector<Vec> left_kernel(const ChainRing& R, const std::vector<Vec>& m, std::size_t ncols) {
  std::vector<Vec> aug;
  for (std::size_t i = 0; i < m.size(); ++i) {
    Vec row = m[i];
    row.resize(ncols + m.size(), 0);
    row[ncols + i] = 1;
    aug.push_back(std::move(row));
  }
  Triangular t = triangularize(R, std::move(aug), ncols);
  std::vector<Vec> out;
  for (const auto& row : t.residual) out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(ncols), row.end());
  return out;
}

// ---------------------------------------------------------------------------

Vec PrimaryModel::embed(const Element& x) const {
  Vec v(coords.size(), 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    auto it = x.coeffs.find(coords[i]);
    if (it == x.coeffs.end()) continue;
    if (it->second.get_den() != 1) throw UsageError("finite model expects integer coefficients");
    v[i] = ring.mul(ring.reduce(it->second.get_num()), ring.pow(ring.exponent() - k[i]));
  }
  return v;
}

Element PrimaryModel::extract(const GroupDesc& g, const Vec& v) const {
  std::map<Coord, Rational> raw;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (v[i] != 0) raw[coords[i]] = Rational(Integer(static_cast<unsigned long>(v[i] / ring.pow(ring.exponent() - k[i]))));
  return make_element(g, raw);
}

Vec PrimaryMap::apply(const Vec& y) const {
  const ChainRing& R = model->ring;
  Vec out(y.size(), 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    std::uint64_t x = y[i] / R.pow(R.exponent() - model->k[i]);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = R.add(out[j], R.mul(x, images[i][j]));
  }
  return out;
}

FiniteModel::FiniteModel(GroupRef finite_group) : group(std::move(finite_group)) {
  const GroupDesc& g = *group;
  if (!g.is_finite()) throw UsageError("finite model needs a finite group");
  for (Prime p : g.primes()) {
    PrimaryModel part;
    part.p = p;
    unsigned e = 1;
    for (std::size_t b = 0; b < g.blocks.size(); ++b) {
      const Block& blk = g.blocks[b];
      if (blk.p != p) continue;
      for (std::uint64_t c = 0; c < *blk.mult; ++c) {
        part.coords.push_back(Coord{static_cast<std::uint32_t>(b), c});
        part.k.push_back(blk.k);
      }
      e = std::max(e, blk.k);
    }
    part.ring = ChainRing(p, e);
    parts.push_back(std::move(part));
  }
}

std::vector<std::vector<Vec>> FiniteModel::split(const std::vector<Element>& gens) const {
  std::vector<std::vector<Vec>> out(parts.size());
  for (const auto& x : gens)
    for (std::size_t i = 0; i < parts.size(); ++i) out[i].push_back(parts[i].embed(x));
  return out;
}

std::vector<PrimaryMap> primary_maps(const FiniteModel& m, const Endo& phi) {
  std::vector<PrimaryMap> out;
  for (const auto& part : m.parts) {
    PrimaryMap pm;
    pm.model = &part;
    for (const auto& c : part.coords) pm.images.push_back(part.embed(apply(phi, unit_element(*m.group, c))));
    out.push_back(std::move(pm));
  }
  return out;
}

namespace {

std::vector<Vec> basis(const ChainRing& R, const std::vector<Vec>& rows, std::size_t n) {
  return triangularize(R, rows, n).pivots;
}

unsigned log_closure(const PrimaryMap& f, std::vector<Vec> rows) {
  const ChainRing& R = f.model->ring;
  const std::size_t n = f.model->dim();
  rows = basis(R, rows, n);
  unsigned current = log_order(R, rows, n);
  while (true) {
    std::vector<Vec> next = rows;
    for (const auto& r : rows) next.push_back(f.apply(r));
    next = basis(R, next, n);
    unsigned o = log_order(R, next, n);
    if (o == current) return current;
    current = o;
    rows = std::move(next);
  }
}

unsigned log_core(const PrimaryMap& f, std::vector<Vec> rows) {
  const ChainRing& R = f.model->ring;
  const std::size_t n = f.model->dim();
  rows = basis(R, rows, n);
  unsigned current = log_order(R, rows, n);
  while (current > 0) {
    // pairs (c, d) with sum c_j phi(g_j) = sum d_j g_j
    std::vector<Vec> m;
    for (const auto& r : rows) m.push_back(f.apply(r));
    for (const auto& r : rows) {
      Vec neg(n);
      for (std::size_t j = 0; j < n; ++j) neg[j] = R.sub(0, r[j]);
      m.push_back(std::move(neg));
    }
    std::vector<Vec> next;
    for (const auto& z : left_kernel(R, m, n)) {
      Vec x(n, 0);
      for (std::size_t j = 0; j < rows.size(); ++j)
        if (z[j] != 0)
          for (std::size_t t = 0; t < n; ++t) x[t] = R.add(x[t], R.mul(z[j], rows[j][t]));
      next.push_back(std::move(x));
    }
    next = basis(R, next, n);
    unsigned o = log_order(R, next, n);
    if (o == current) break;
    current = o;
    rows = std::move(next);
  }
  return current;
}

}  // namespace

Integer index_in_sum(const FiniteModel& m, const std::vector<PrimaryMap>& maps, const std::vector<Element>& gens) {
  auto split = m.split(gens);
  Integer index = 1;
  for (std::size_t i = 0; i < m.parts.size(); ++i) {
    const ChainRing& R = m.parts[i].ring;
    const std::size_t n = m.parts[i].dim();
    std::vector<Vec> k = split[i];
    for (const auto& h : split[i]) k.push_back(maps[i].apply(h));
    unsigned diff = log_order(R, k, n) - log_order(R, split[i], n);
    index *= ipow(m.parts[i].p, diff);
  }
  return index;
}

Integer fs_ratio(const FiniteModel& m, const std::vector<PrimaryMap>& maps, const std::vector<Element>& gens) {
  auto split = m.split(gens);
  Integer ratio = 1;
  for (std::size_t i = 0; i < m.parts.size(); ++i)
    ratio *= ipow(m.parts[i].p, log_closure(maps[i], split[i]) - log_core(maps[i], split[i]));
  return ratio;
}

}  // namespace endoring::plocal
