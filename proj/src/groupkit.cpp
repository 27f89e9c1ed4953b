#include "endoring/groupkit.hpp"

#include <algorithm>
#include <set>

namespace endoring {

std::string to_string(const Cardinal& c) { return c ? std::to_string(*c) : std::string("omega"); }

Block Block::cyclic(std::string name, Prime p, unsigned k, Cardinal mult) {
  Block b;
  b.name = std::move(name);
  b.kind = BlockKind::Cyclic;
  b.p = p;
  b.k = k;
  b.mult = mult;
  return b;
}

Block Block::prufer(std::string name, Prime p, Cardinal copies) {
  Block b;
  b.name = std::move(name);
  b.kind = BlockKind::Prufer;
  b.p = p;
  b.mult = copies;
  return b;
}

Block Block::torsion_free(std::string name, std::vector<Prime> pi, std::uint64_t rank) {
  Block b;
  b.name = std::move(name);
  b.kind = BlockKind::TorsionFree;
  std::sort(pi.begin(), pi.end());
  pi.erase(std::unique(pi.begin(), pi.end()), pi.end());
  b.pi = std::move(pi);
  b.mult = rank;
  return b;
}

Block Block::free_omega(std::string name) {
  Block b;
  b.name = std::move(name);
  b.kind = BlockKind::FreeOmega;
  b.mult = kOmega;
  return b;
}

bool Block::has_prime_in_pi(Prime q) const { return std::binary_search(pi.begin(), pi.end(), q); }

void GroupDesc::validate() const {
  std::set<std::string> names;
  int free_omega = 0;
  for (const auto& b : blocks) {
    if (!names.insert(b.name).second) throw UsageError("duplicate block name '" + b.name + "'");
    if (b.mult && *b.mult == 0) throw UsageError("block '" + b.name + "' has zero multiplicity");
    switch (b.kind) {
      case BlockKind::Cyclic:
        if (b.k < 1) throw UsageError("cyclic block '" + b.name + "' needs k >= 1");
        [[fallthrough]];
      case BlockKind::Prufer:
        if (!is_prime(b.p)) throw UsageError("block '" + b.name + "': p=" + std::to_string(b.p) + " is not prime");
        break;
      case BlockKind::TorsionFree:
        if (!b.mult) throw UsageError("torsion-free block '" + b.name + "' with rank omega must have pi = {}");
        for (Prime q : b.pi)
          if (!is_prime(q)) throw UsageError("block '" + b.name + "': " + std::to_string(q) + " is not prime");
        break;
      case BlockKind::FreeOmega:
        if (++free_omega > 1) throw UsageError("at most one free block of rank omega");
        break;
    }
  }
}

std::optional<std::size_t> GroupDesc::find(const std::string& block_name) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].name == block_name) return i;
  return std::nullopt;
}

std::size_t GroupDesc::index_of(const std::string& block_name) const {
  auto i = find(block_name);
  if (!i) throw UsageError("unknown block '" + block_name + "' in group '" + name + "'");
  return *i;
}

bool GroupDesc::is_periodic() const {
  return std::none_of(blocks.begin(), blocks.end(), [](const Block& b) { return b.is_torsion_free(); });
}

bool GroupDesc::has_ftfr() const {
  return std::none_of(blocks.begin(), blocks.end(), [](const Block& b) { return b.kind == BlockKind::FreeOmega; });
}

bool GroupDesc::is_finite() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [](const Block& b) { return b.kind == BlockKind::Cyclic && b.mult.has_value(); });
}

std::vector<Prime> GroupDesc::primes() const {
  std::set<Prime> s;
  for (const auto& b : blocks) {
    if (b.is_torsion()) s.insert(b.p);
    s.insert(b.pi.begin(), b.pi.end());
  }
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Elements

namespace {

const Block& block_at(const GroupDesc& g, const Coord& c) {
  if (c.block >= g.blocks.size()) throw UsageError("coordinate block index out of range");
  const Block& b = g.blocks[c.block];
  if (b.mult && c.copy >= *b.mult)
    throw UsageError("copy index " + std::to_string(c.copy) + " out of range for block '" + b.name + "'");
  return b;
}

bool denominator_is_power_of(const Integer& den, Prime p) {
  Integer d = den;
  Integer pp = to_integer(p);
  while (mpz_divisible_p(d.get_mpz_t(), pp.get_mpz_t())) d /= pp;
  return d == 1;
}

Rational frac_part(const Rational& x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return Rational(x - q);
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace

bool coefficient_admissible(const GroupDesc& g, const Coord& c, const Rational& value) {
  const Block& b = block_at(g, c);
  switch (b.kind) {
    case BlockKind::Cyclic:
    case BlockKind::FreeOmega:
      return value.get_den() == 1;
    case BlockKind::Prufer:
      return denominator_is_power_of(value.get_den(), b.p);
    case BlockKind::TorsionFree:
      return denominator_within(value, b.pi);
  }
  return false;
}

Rational normalize_coefficient(const GroupDesc& g, const Coord& c, const Rational& value) {
  const Block& b = block_at(g, c);
  if (!coefficient_admissible(g, c, value))
    throw UsageError("coefficient " + to_string(value) + " not admissible in block '" + b.name + "'");
  switch (b.kind) {
    case BlockKind::Cyclic:
      return Rational(mod_floor(value.get_num(), ipow(b.p, b.k)));
    case BlockKind::Prufer:
      return frac_part(value);
    default:
      return value;
  }
}

Element make_element(const GroupDesc& g, const std::map<Coord, Rational>& raw) {
  Element e;
  for (const auto& [c, v] : raw) {
    Rational n = normalize_coefficient(g, c, v);
    if (n != 0) e.coeffs[c] = n;
  }
  return e;
}

Element unit_element(const GroupDesc& g, const Coord& c) {
  const Block& b = block_at(g, c);
  if (b.kind == BlockKind::Prufer) throw UsageError("Prufer coordinates have no unit generator");
  return make_element(g, {{c, Rational(1)}});
}

Element prufer_element(const GroupDesc& g, const Coord& c, unsigned depth) {
  const Block& b = block_at(g, c);
  if (b.kind != BlockKind::Prufer) throw UsageError("not a Prufer coordinate");
  return make_element(g, {{c, make_rational(1, ipow(b.p, depth))}});
}

Element element_add(const GroupDesc& g, const Element& x, const Element& y) {
  std::map<Coord, Rational> raw = x.coeffs;
  for (const auto& [c, v] : y.coeffs) raw[c] += v;
  return make_element(g, raw);
}

Element element_neg(const GroupDesc& g, const Element& x) {
  std::map<Coord, Rational> raw;
  for (const auto& [c, v] : x.coeffs) raw[c] = -v;
  return make_element(g, raw);
}

Element element_sub(const GroupDesc& g, const Element& x, const Element& y) {
  return element_add(g, x, element_neg(g, y));
}

Element element_scale(const GroupDesc& g, const Element& x, const Integer& n) {
  std::map<Coord, Rational> raw;
  for (const auto& [c, v] : x.coeffs) raw[c] = v * n;
  return make_element(g, raw);
}

std::optional<Integer> element_order(const GroupDesc& g, const Element& x) {
  Integer order = 1;
  for (const auto& [c, v] : x.coeffs) {
    const Block& b = block_at(g, c);
    switch (b.kind) {
      case BlockKind::Cyclic: {
        unsigned vp = std::min(valuation(v.get_num(), b.p), b.k);
        order = lcm(order, ipow(b.p, b.k - vp));
        break;
      }
      case BlockKind::Prufer:
        order = lcm(order, v.get_den());
        break;
      default:
        return std::nullopt;
    }
  }
  return order;
}

bool element_is_torsion(const GroupDesc& g, const Element& x) { return element_order(g, x).has_value(); }

std::string to_string(const GroupDesc& g, const Element& x) {
  std::string out = "{";
  bool first = true;
  for (const auto& [c, v] : x.coeffs) {
    if (!first) out += ", ";
    first = false;
    out += g.blocks.at(c.block).name + "." + std::to_string(c.copy) + ": " + to_string(v);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Invariants

PrimeSelector PrimeSelector::finite(std::vector<Prime> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  return PrimeSelector{false, std::move(primes)};
}

PrimeSelector PrimeSelector::cofinite(std::vector<Prime> excluded) {
  auto s = finite(std::move(excluded));
  s.default_member = true;
  return s;
}

bool PrimeSelector::contains(Prime p) const {
  bool listed = std::binary_search(exceptions.begin(), exceptions.end(), p);
  return default_member ? !listed : listed;
}

PrimeInvariants Invariants::at(Prime p) const {
  auto it = primes.find(p);
  return it == primes.end() ? PrimeInvariants{} : it->second;
}

namespace {
Cardinal add_cardinal(Cardinal a, Cardinal b) {
  if (!a || !b) return kOmega;
  return *a + *b;
}
}  // namespace

Invariants invariants(const GroupDesc& a) {
  a.validate();
  Invariants inv;
  const bool ftfr = a.has_ftfr();
  const bool periodic = a.is_periodic();
  inv.r0 = 0;
  for (const auto& b : a.blocks) {
    if (b.kind == BlockKind::TorsionFree) inv.r0 = add_cardinal(inv.r0, b.mult);
    if (b.kind == BlockKind::FreeOmega) inv.r0 = kOmega;
  }
  for (Prime p : a.primes()) {
    PrimeInvariants pr;
    for (const auto& b : a.blocks) {
      if (b.kind == BlockKind::Cyclic && b.p == p) {
        pr.max_k = std::max(pr.max_k, b.k);
        if (!b.mult) {
          pr.omega_cyclic = true;
          pr.eps_k = std::max(pr.eps_k, b.k);
        }
      } else if (b.kind == BlockKind::Prufer && b.p == p) {
        pr.d = add_cardinal(pr.d, b.mult);
      } else if (b.kind == BlockKind::TorsionFree && b.has_prime_in_pi(p)) {
        pr.s_rank += *b.mult;
      }
    }
    const bool divisible_part = !pr.d || *pr.d > 0 || pr.s_rank > 0;
    pr.e = divisible_part ? kInfinite : Bound(pr.max_k);
    pr.eps = divisible_part ? kInfinite : Bound(pr.eps_k);
    pr.c = pr.max_k;
    pr.critical = ftfr && pr.omega_cyclic && divisible_part && pr.d.has_value();
    inv.primes[p] = pr;
  }

  std::vector<Prime> prufer_primes, infinite_primes, critical;
  for (const auto& [p, pr] : inv.primes) {
    if (!pr.d || *pr.d > 0) prufer_primes.push_back(p);
    if (!pr.d || *pr.d > 0 || pr.omega_cyclic) infinite_primes.push_back(p);
    if (pr.critical) critical.push_back(p);
  }
  if (periodic) {
    inv.pi_star = PrimeSelector::cofinite(prufer_primes);
    inv.pi0 = PrimeSelector::cofinite(infinite_primes);
  } else {
    // Primes that divide every torsion-free block.
    std::vector<Prime> candidates;
    bool first = true;
    for (const auto& b : a.blocks) {
      if (!b.is_torsion_free()) continue;
      if (first) {
        candidates = b.pi;
        first = false;
      } else {
        std::vector<Prime> keep;
        std::set_intersection(candidates.begin(), candidates.end(), b.pi.begin(), b.pi.end(),
                              std::back_inserter(keep));
        candidates = std::move(keep);
      }
    }
    std::vector<Prime> star, zero;
    for (Prime p : candidates) {
      if (!std::binary_search(prufer_primes.begin(), prufer_primes.end(), p)) star.push_back(p);
      if (!std::binary_search(infinite_primes.begin(), infinite_primes.end(), p)) zero.push_back(p);
    }
    inv.pi_star = PrimeSelector::finite(star);
    inv.pi0 = PrimeSelector::finite(zero);
  }
  inv.pi_c = PrimeSelector::finite(critical);
  return inv;
}

HDescriptor h_descriptor(const GroupDesc& a) {
  if (!a.has_ftfr()) throw UnsupportedError("H(A) needs finite torsion-free rank");
  HDescriptor out;
  for (const auto& [p, pr] : invariants(a).primes) {
    if (pr.e && *pr.e == 0) continue;
    out[p] = HBounds{pr.e, pr.eps};
  }
  return out;
}

namespace {
bool divisible_by_power(const Rational& diff, Prime p, const Bound& b) {
  if (diff == 0) return true;
  if (!b) return false;
  auto v = valuation(diff, p);
  return *v >= static_cast<long>(*b);
}
}  // namespace

bool h_equal(const HElement& x, const HElement& y) {
  if (x.descriptor != y.descriptor) throw UsageError("H-element descriptor mismatch");
  for (const auto& [p, bounds] : x.descriptor) {
    Rational diff = x.value.at(p) - y.value.at(p);
    if (divisible_by_power(diff, p, bounds.e)) continue;
    if (!divisible_by_power(diff, p, bounds.eps)) return false;
  }
  return true;
}

HElement h_add(const HElement& x, const HElement& y) {
  if (x.descriptor != y.descriptor) throw UsageError("H-element descriptor mismatch");
  return HElement{x.value + y.value, x.descriptor};
}

HElement h_mul(const HElement& x, const HElement& y) {
  if (x.descriptor != y.descriptor) throw UsageError("H-element descriptor mismatch");
  return HElement{x.value * y.value, x.descriptor};
}

NMType nm_type(const GroupDesc& a) {
  if (!a.has_ftfr()) throw UnsupportedError("NM(A) needs finite torsion-free rank");
  NMType out;
  for (const auto& [p, pr] : invariants(a).primes)
    if (pr.critical) out[p] = pr.c;
  return out;
}

// ---------------------------------------------------------------------------
// Truncations

Truncation truncate(const GroupDesc& a, unsigned level, std::optional<Prime> sampling_prime,
                    unsigned min_prufer_depth) {
  if (level < 1) throw UsageError("truncation level must be >= 1");
  a.validate();
  Truncation t;
  t.level = level;
  t.prufer_depth = std::max(level, min_prufer_depth);
  t.sampling_prime = sampling_prime;
  t.group.name = a.name + "@" + std::to_string(level);
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const Block& b = a.blocks[i];
    Cardinal copies = b.mult ? b.mult : Cardinal(level);
    switch (b.kind) {
      case BlockKind::Cyclic:
        t.group.blocks.push_back(Block::cyclic(b.name, b.p, b.k, copies));
        break;
      case BlockKind::Prufer:
        t.group.blocks.push_back(Block::cyclic(b.name, b.p, t.prufer_depth, copies));
        break;
      case BlockKind::TorsionFree:
      case BlockKind::FreeOmega:
        if (!sampling_prime || b.has_prime_in_pi(*sampling_prime)) continue;
        t.group.blocks.push_back(Block::cyclic(b.name, *sampling_prime, level, copies));
        break;
    }
    t.source_block.push_back(i);
  }
  return t;
}

Element Truncation::lift(const Element& truncated, const GroupDesc& original) const {
  std::map<Coord, Rational> raw;
  for (const auto& [c, v] : truncated.coeffs) {
    std::size_t src = source_block.at(c.block);
    const Block& b = original.blocks[src];
    Coord oc{static_cast<std::uint32_t>(src), c.copy};
    if (b.kind == BlockKind::Prufer)
      raw[oc] = v / Rational(ipow(b.p, prufer_depth));
    else if (b.kind == BlockKind::Cyclic)
      raw[oc] = v;
    else
      throw UsageError("torsion-free quotient coordinates do not lift");
  }
  return make_element(original, raw);
}

std::optional<Element> Truncation::restrict(const Element& x, const GroupDesc& original) const {
  std::map<Coord, Rational> raw;
  for (const auto& [c, v] : x.coeffs) {
    auto it = std::find(source_block.begin(), source_block.end(), c.block);
    if (it == source_block.end()) return std::nullopt;
    Coord tc{static_cast<std::uint32_t>(it - source_block.begin()), c.copy};
    const Block& b = original.blocks[c.block];
    if (!b.mult && c.copy >= level) return std::nullopt;
    if (b.kind == BlockKind::Prufer) {
      Rational scaled = v * Rational(ipow(b.p, prufer_depth));
      if (scaled.get_den() != 1) return std::nullopt;
      raw[tc] = scaled;
    } else if (b.kind == BlockKind::Cyclic) {
      raw[tc] = v;
    } else {
      return std::nullopt;
    }
  }
  return make_element(group, raw);
}

Integer finite_order(const GroupDesc& g) {
  if (!g.is_finite()) throw UsageError("group is not finite");
  Integer n = 1;
  for (const auto& b : g.blocks) n *= ipow(ipow(b.p, b.k), static_cast<unsigned>(*b.mult));
  return n;
}

}  // namespace endoring
