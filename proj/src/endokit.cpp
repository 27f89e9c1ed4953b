#include "endoring/endokit.hpp"

#include <algorithm>

namespace endoring {

Layout::Layout(const GroupDesc& g) {
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const Block& b = g.blocks[i];
    const auto bi = static_cast<std::uint32_t>(i);
    switch (b.kind) {
      case BlockKind::TorsionFree:
        for (std::uint64_t c = 0; c < *b.mult; ++c) {
          tf_index[Coord{bi, c}] = tf_coords.size();
          tf_coords.push_back(Coord{bi, c});
        }
        break;
      case BlockKind::FreeOmega:
        free_block = bi;
        break;
      case BlockKind::Prufer:
        if (!b.mult) {
          scalar_prufer_primes.insert(b.p);
        } else {
          for (std::uint64_t c = 0; c < *b.mult; ++c) prufer_coords[b.p].push_back(Coord{bi, c});
        }
        break;
      case BlockKind::Cyclic:
        break;
    }
  }
  for (Prime p : scalar_prufer_primes) prufer_coords.erase(p);
}

namespace {

using Raw = std::map<Coord, Rational>;

void accumulate(Raw& raw, const Element& e, const Rational& factor) {
  if (factor == 0) return;
  for (const auto& [c, v] : e.coeffs) raw[c] += v * factor;
}

std::size_t position(const std::vector<Coord>& coords, const Coord& c) {
  auto it = std::find(coords.begin(), coords.end(), c);
  if (it == coords.end()) throw UsageError("coordinate not in layout");
  return static_cast<std::size_t>(it - coords.begin());
}

bool is_scalar_matrix(const RatMatrix& m, Rational& value) {
  if (m.rows() == 0) return false;
  value = m(0, 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != (i == j ? value : Rational(0))) return false;
  return true;
}

const Block& block_of(const Endo& phi, const Coord& c) {
  if (c.block >= phi.g().blocks.size()) throw UsageError("coordinate block index out of range");
  return phi.g().blocks[c.block];
}

std::string coord_name(const GroupDesc& g, const Coord& c) {
  return g.blocks.at(c.block).name + "." + std::to_string(c.copy);
}

Integer block_modulus(const Block& b) { return ipow(b.p, b.k); }

DivAction scaled_div(const DivAction& a, const Rational& f) {
  DivAction out = a;
  out.scalar *= f;
  for (std::size_t i = 0; i < out.matrix.rows(); ++i)
    for (std::size_t j = 0; j < out.matrix.cols(); ++j) out.matrix(i, j) *= f;
  return out;
}

}  // namespace

Endo Endo::zero(GroupRef g) {
  Endo e;
  e.group = std::move(g);
  Layout lay(*e.group);
  e.tf = RatMatrix(lay.tf_coords.size(), lay.tf_coords.size());
  for (Prime p : lay.scalar_prufer_primes) e.div[p] = DivAction{true, 0, {}};
  for (const auto& [p, coords] : lay.prufer_coords) e.div[p] = DivAction{false, 0, RatMatrix(coords.size(), coords.size())};
  e.cyc.assign(e.group->blocks.size(), Integer(0));
  return e;
}

Endo Endo::identity(GroupRef g) {
  Endo e = zero(std::move(g));
  for (std::size_t i = 0; i < e.tf.rows(); ++i) e.tf(i, i) = 1;
  if (Layout(e.g()).free_block) e.free_scalar = 1;
  for (auto& [p, d] : e.div) {
    d.scalar = d.scalar_form ? 1 : 0;
    for (std::size_t i = 0; i < d.matrix.rows(); ++i) d.matrix(i, i) = 1;
  }
  for (std::size_t b = 0; b < e.cyc.size(); ++b)
    if (e.g().blocks[b].kind == BlockKind::Cyclic) e.cyc[b] = mod_floor(1, block_modulus(e.g().blocks[b]));
  return e;
}

std::string to_string(const MultValue& v) {
  if (const auto* r = std::get_if<Rational>(&v)) return to_string(*r);
  const auto& j = std::get<JElement>(v);
  std::string s = "J(" + to_string(j.default_value());
  for (const auto& [p, x] : j.exceptions()) s += "; " + std::to_string(p) + ":" + to_string(x);
  return s + ")";
}

// ---------------------------------------------------------------------------
// Construction helpers

Endo semi_multiplication(GroupRef g, const Integer& n, const std::vector<Prime>& pi, const Rational& alpha) {
  Endo e = Endo::zero(std::move(g));
  auto in_pi = [&](Prime p) { return std::find(pi.begin(), pi.end(), p) != pi.end(); };
  for (std::size_t i = 0; i < e.tf.rows(); ++i) e.tf(i, i) = alpha;
  if (Layout(e.g()).free_block) {
    if (alpha.get_den() != 1) throw UsageError("non-integer multiplication on a free group of infinite rank");
    e.free_scalar = alpha.get_num();
  }
  for (auto& [p, d] : e.div) {
    if (in_pi(p)) throw UsageError("semi-multiplication prime set meets a Prufer prime");
    if (!is_p_integral(alpha, p)) throw UsageError("scalar not p-integral at a Prufer prime");
    d.scalar = d.scalar_form ? alpha : Rational(0);
    for (std::size_t i = 0; i < d.matrix.rows(); ++i) d.matrix(i, i) = alpha;
  }
  for (std::size_t b = 0; b < e.cyc.size(); ++b) {
    const Block& blk = e.g().blocks[b];
    if (blk.kind != BlockKind::Cyclic) continue;
    if (in_pi(blk.p)) {
      e.cyc[b] = mod_floor(n, block_modulus(blk));
    } else {
      if (!is_p_integral(alpha, blk.p)) throw UsageError("scalar not p-integral at a cyclic prime");
      e.cyc[b] = rational_mod(alpha, block_modulus(blk));
    }
  }
  return e;
}

Endo multiplication(GroupRef g, const Rational& r) { return semi_multiplication(std::move(g), 0, {}, r); }

Endo multiplication(GroupRef g, const JElement& alpha) {
  Endo e = Endo::zero(std::move(g));
  for (auto& [p, d] : e.div) {
    Rational a = alpha.at(p);
    d.scalar = d.scalar_form ? a : Rational(0);
    for (std::size_t i = 0; i < d.matrix.rows(); ++i) d.matrix(i, i) = a;
  }
  for (std::size_t b = 0; b < e.cyc.size(); ++b) {
    const Block& blk = e.g().blocks[b];
    if (blk.kind == BlockKind::Cyclic) e.cyc[b] = rational_mod(alpha.at(blk.p), block_modulus(blk));
  }
  return e;
}

Endo mini_multiplication(GroupRef g, const Integer& n, const std::vector<Prime>& pi) {
  std::map<Prime, Integer> per_prime;
  for (Prime p : pi) per_prime[p] = n;
  return mini_multiplication(std::move(g), per_prime);
}

Endo mini_multiplication(GroupRef g, const std::map<Prime, Integer>& per_prime) {
  Endo e = Endo::zero(std::move(g));
  for (std::size_t b = 0; b < e.cyc.size(); ++b) {
    const Block& blk = e.g().blocks[b];
    if (blk.kind != BlockKind::Cyclic) continue;
    auto it = per_prime.find(blk.p);
    if (it != per_prime.end()) e.cyc[b] = mod_floor(it->second, block_modulus(blk));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate(const Endo& phi) {
  std::vector<std::string> issues = phi.deferred_issues;
  if (!phi.group) return {"endomorphism has no group"};
  const GroupDesc& g = phi.g();
  Layout lay(g);
  const std::size_t n_tf = lay.tf_coords.size();
  if (phi.tf.rows() != n_tf || phi.tf.cols() != n_tf) issues.push_back("tf matrix has the wrong shape");
  if (phi.cyc.size() != g.blocks.size()) issues.push_back("cyc vector has the wrong length");
  if (!lay.free_block && phi.free_scalar != 0) issues.push_back("free scalar set but the group has no free block of rank omega");
  if (!issues.empty()) return issues;

  for (std::size_t t = 0; t < n_tf; ++t)
    for (std::size_t s = 0; s < n_tf; ++s) {
      const Rational& x = phi.tf(t, s);
      if (x == 0) continue;
      const Block& src = g.blocks[lay.tf_coords[s].block];
      const Block& tgt = g.blocks[lay.tf_coords[t].block];
      bool contained = std::includes(tgt.pi.begin(), tgt.pi.end(), src.pi.begin(), src.pi.end());
      if (!contained || !denominator_within(x, tgt.pi))
        issues.push_back("tf[" + coord_name(g, lay.tf_coords[s]) + " -> " + coord_name(g, lay.tf_coords[t]) +
                         "] = " + to_string(x) + ": pi(source) not in pi(target) or denominator outside pi(target)");
    }

  std::set<Prime> div_primes;
  for (const auto& [p, coords] : lay.prufer_coords) div_primes.insert(p);
  div_primes.insert(lay.scalar_prufer_primes.begin(), lay.scalar_prufer_primes.end());
  for (const auto& [p, d] : phi.div) {
    if (!div_primes.count(p)) {
      issues.push_back("div action for prime " + std::to_string(p) + " without Prufer blocks");
      continue;
    }
    if (d.scalar_form != lay.scalar_prufer_primes.count(p)) {
      issues.push_back("div action at p=" + std::to_string(p) + " must be " +
                       (d.scalar_form ? "a matrix" : "a scalar (omega Prufer copies)"));
      continue;
    }
    if (d.scalar_form) {
      if (!is_p_integral(d.scalar, p)) issues.push_back("div scalar " + to_string(d.scalar) + " not p-integral at p=" + std::to_string(p));
    } else {
      const auto& coords = lay.prufer_coords.at(p);
      if (d.matrix.rows() != coords.size() || d.matrix.cols() != coords.size()) {
        issues.push_back("div matrix at p=" + std::to_string(p) + " has the wrong shape");
        continue;
      }
      for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = 0; j < coords.size(); ++j)
          if (!is_p_integral(d.matrix(i, j), p))
            issues.push_back("div[" + coord_name(g, coords[j]) + " -> " + coord_name(g, coords[i]) + "] not p-integral");
    }
  }

  auto copy_ok = [&](const Coord& c) {
    if (c.block >= g.blocks.size()) return false;
    const Block& b = g.blocks[c.block];
    return !b.mult || c.copy < *b.mult;
  };

  for (const auto& t : phi.tau) {
    if (!copy_ok(t.source) || !copy_ok(t.target)) {
      issues.push_back("tau entry references a copy out of range");
      continue;
    }
    const Block& src = g.blocks[t.source.block];
    const Block& tgt = g.blocks[t.target.block];
    if (src.kind != BlockKind::TorsionFree) {
      issues.push_back("tau source " + coord_name(g, t.source) + " is not a finite-rank torsion-free copy");
      continue;
    }
    if (tgt.kind != BlockKind::Prufer) {
      issues.push_back("tau target " + coord_name(g, t.target) + " is not a Prufer copy");
      continue;
    }
    if (!src.has_prime_in_pi(tgt.p))
      issues.push_back("tau source " + coord_name(g, t.source) + " is not " + std::to_string(tgt.p) + "-divisible");
  }

  for (const auto& f : phi.fin) {
    if (!copy_ok(f.source)) {
      issues.push_back("fin source out of range");
      continue;
    }
    const Block& src = g.blocks[f.source.block];
    bool image_ok = true;
    for (const auto& [c, v] : f.image.coeffs) {
      if (!copy_ok(c) || !g.blocks[c.block].is_torsion() || !coefficient_admissible(g, c, v)) {
        image_ok = false;
        break;
      }
    }
    if (!image_ok) {
      issues.push_back("fin[" + coord_name(g, f.source) + "] image is not a torsion element of the group");
      continue;
    }
    Integer ord = *element_order(g, make_element(g, f.image.coeffs));
    switch (src.kind) {
      case BlockKind::Prufer:
        issues.push_back("fin[" + coord_name(g, f.source) + "]: Prufer-sourced finitary maps are zero");
        break;
      case BlockKind::Cyclic:
        if (!mpz_divisible_p(block_modulus(src).get_mpz_t(), ord.get_mpz_t()))
          issues.push_back("fin[" + coord_name(g, f.source) + "]: image order " + ord.get_str() +
                           " does not divide the source order");
        break;
      case BlockKind::TorsionFree:
      case BlockKind::FreeOmega: {
        if (f.modulus && (*f.modulus <= 0 || !mpz_divisible_p(f.modulus->get_mpz_t(), ord.get_mpz_t())))
          issues.push_back("fin[" + coord_name(g, f.source) + "]: image order " + ord.get_str() +
                           " does not divide the modulus");
        Integer w = f.modulus ? *f.modulus : ord;
        for (Prime q : src.pi)
          if (w > 0 && mpz_divisible_ui_p(w.get_mpz_t(), q))
            issues.push_back("fin[" + coord_name(g, f.source) + "]: modulus not coprime to pi(source)");
        break;
      }
    }
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Normal form

Endo normalize(const Endo& phi) {
  const GroupDesc& g = phi.g();
  Endo out = phi;
  out.deferred_issues.clear();
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    if (g.blocks[b].kind == BlockKind::Cyclic)
      out.cyc[b] = mod_floor(out.cyc[b], block_modulus(g.blocks[b]));
    else
      out.cyc[b] = 0;
  }

  std::map<std::pair<Coord, Coord>, Rational> tau;
  for (const auto& t : phi.tau) tau[{t.source, t.target}] += t.scale;
  out.tau.clear();
  for (const auto& [key, s] : tau)
    if (s != 0) out.tau.push_back(TauEntry{key.first, key.second, s});

  std::map<Coord, Raw> images;
  for (const auto& f : phi.fin) accumulate(images[f.source], f.image, 1);

  // finite cyclic blocks: scalar = own coefficient of the first copy's image
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind != BlockKind::Cyclic || !blk.mult) continue;
    const auto bi = static_cast<std::uint32_t>(b);
    Raw& first = images[Coord{bi, 0}];
    Rational own = first.count(Coord{bi, 0}) ? first[Coord{bi, 0}] : Rational(0);
    Integer s = mod_floor(out.cyc[b] + own.get_num(), block_modulus(blk));
    Integer delta = out.cyc[b] - s;
    out.cyc[b] = s;
    for (std::uint64_t c = 0; c < *blk.mult; ++c) images[Coord{bi, c}][Coord{bi, c}] += Rational(delta);
  }

  out.fin.clear();
  for (auto& [src, raw] : images) {
    Element img = make_element(g, raw);
    if (img.is_zero()) continue;
    const Block& blk = g.blocks[src.block];
    FinEntry f{src, std::nullopt, img};
    if (blk.is_torsion_free()) f.modulus = element_order(g, img);
    out.fin.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Rational prufer_scale(const Rational& alpha, const Rational& y, Prime p) {
  if (y == 0 || alpha == 0) return 0;
  unsigned j = valuation(y.get_den(), p);
  Integer m = ipow(p, j);
  Integer res = rational_mod(alpha, m);
  return make_rational(mod_floor(res * y.get_num(), m), m);
}

Rational p_primary_part(const Rational& y, Prime p) {
  if (y == 0) return 0;
  unsigned a = valuation(y.get_den(), p);
  if (a == 0) return 0;
  Integer pa = ipow(p, a);
  Integer rest = y.get_den() / pa;
  Integer inv = *mod_inverse(rest, pa);
  return make_rational(mod_floor(y.get_num() * inv, pa), pa);
}

Element generator_image(const Endo& phi, const Coord& c) {
  const GroupDesc& g = phi.g();
  const Block& b = block_of(phi, c);
  Raw raw;
  if (b.kind == BlockKind::Cyclic)
    raw[c] += Rational(phi.cyc[c.block]);
  else if (b.kind == BlockKind::FreeOmega)
    raw[c] += Rational(phi.free_scalar);
  else
    throw UsageError("generator_image needs a cyclic or free coordinate");
  for (const auto& f : phi.fin)
    if (f.source == c) accumulate(raw, f.image, 1);
  return make_element(g, raw);
}

bool block_is_exact(const Endo& phi, std::size_t block) {
  return std::none_of(phi.fin.begin(), phi.fin.end(), [&](const FinEntry& f) { return f.source.block == block; });
}

Element apply(const Endo& phi, const Element& x) {
  const GroupDesc& g = phi.g();
  Layout lay(g);
  Raw raw;
  for (const auto& [c, v] : x.coeffs) {
    const Block& b = block_of(phi, c);
    switch (b.kind) {
      case BlockKind::Cyclic:
      case BlockKind::FreeOmega:
        accumulate(raw, generator_image(phi, c), v);
        break;
      case BlockKind::Prufer: {
        const DivAction& d = phi.div.at(b.p);
        if (d.scalar_form) {
          raw[c] += prufer_scale(d.scalar, v, b.p);
        } else {
          const auto& coords = lay.prufer_coords.at(b.p);
          std::size_t j = position(coords, c);
          for (std::size_t i = 0; i < coords.size(); ++i) raw[coords[i]] += prufer_scale(d.matrix(i, j), v, b.p);
        }
        break;
      }
      case BlockKind::TorsionFree: {
        std::size_t j = lay.tf_index.at(c);
        for (std::size_t i = 0; i < lay.tf_coords.size(); ++i)
          if (phi.tf(i, j) != 0) raw[lay.tf_coords[i]] += phi.tf(i, j) * v;
        for (const auto& t : phi.tau)
          if (t.source == c) raw[t.target] += p_primary_part(t.scale * v, g.blocks[t.target.block].p);
        for (const auto& f : phi.fin) {
          if (f.source != c) continue;
          Integer w = f.modulus ? *f.modulus : *element_order(g, f.image);
          accumulate(raw, f.image, Rational(rational_mod(v, w)));
        }
        break;
      }
    }
  }
  return make_element(g, raw);
}

// ---------------------------------------------------------------------------
// Ring operations

namespace {
void require_same_group(const Endo& a, const Endo& b) {
  if (!(a.g() == b.g())) throw UsageError("endomorphisms of different groups");
}
}  // namespace

Endo add(const Endo& phi, const Endo& psi) {
  require_same_group(phi, psi);
  Endo out = phi;
  out.tf = phi.tf + psi.tf;
  out.free_scalar += psi.free_scalar;
  for (auto& [p, d] : out.div) {
    const DivAction& e = psi.div.at(p);
    d.scalar += e.scalar;
    if (!d.scalar_form) d.matrix = d.matrix + e.matrix;
  }
  for (std::size_t b = 0; b < out.cyc.size(); ++b) out.cyc[b] += psi.cyc[b];
  out.fin.insert(out.fin.end(), psi.fin.begin(), psi.fin.end());
  out.tau.insert(out.tau.end(), psi.tau.begin(), psi.tau.end());
  return normalize(out);
}

Endo scale(const Endo& phi, const Integer& n) {
  Endo out = phi;
  const Rational f(n);
  for (std::size_t i = 0; i < out.tf.rows(); ++i)
    for (std::size_t j = 0; j < out.tf.cols(); ++j) out.tf(i, j) *= f;
  out.free_scalar *= n;
  for (auto& [p, d] : out.div) d = scaled_div(d, f);
  for (auto& c : out.cyc) c *= n;
  for (auto& fe : out.fin) fe.image = element_scale(phi.g(), fe.image, n);
  for (auto& t : out.tau) t.scale *= f;
  return normalize(out);
}

Endo negate(const Endo& phi) { return scale(phi, -1); }

Endo sub(const Endo& phi, const Endo& psi) { return add(phi, negate(psi)); }

Endo compose(const Endo& psi, const Endo& phi) {
  require_same_group(psi, phi);
  const GroupDesc& g = phi.g();
  Layout lay(g);
  Endo out = Endo::zero(phi.group);
  out.tf = psi.tf * phi.tf;
  out.free_scalar = psi.free_scalar * phi.free_scalar;
  for (auto& [p, d] : out.div) {
    const DivAction& a = psi.div.at(p);
    const DivAction& b = phi.div.at(p);
    d.scalar = a.scalar * b.scalar;
    if (!d.scalar_form) d.matrix = a.matrix * b.matrix;
  }
  for (std::size_t b = 0; b < out.cyc.size(); ++b) out.cyc[b] = psi.cyc[b] * phi.cyc[b];

  // Finitely generated sources: evaluate on generators.
  std::set<Coord> gen_sources;
  for (const auto* e : {&phi, &psi})
    for (const auto& f : e->fin) {
      const Block& b = g.blocks[f.source.block];
      if (b.kind == BlockKind::Cyclic || b.kind == BlockKind::FreeOmega) gen_sources.insert(f.source);
    }
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind == BlockKind::Cyclic && blk.mult)
      for (std::uint64_t c = 0; c < *blk.mult; ++c) gen_sources.insert(Coord{static_cast<std::uint32_t>(b), c});
  }
  for (const Coord& c : gen_sources) {
    const Block& blk = g.blocks[c.block];
    Element full = apply(psi, apply(phi, unit_element(g, c)));
    Rational base = blk.kind == BlockKind::Cyclic ? Rational(out.cyc[c.block]) : Rational(out.free_scalar);
    Element corr = element_sub(g, full, make_element(g, {{c, base}}));
    if (!corr.is_zero()) out.fin.push_back(FinEntry{c, std::nullopt, corr});
  }

  // Finite-rank torsion-free sources.
  for (std::size_t j = 0; j < lay.tf_coords.size(); ++j) {
    const Coord& cj = lay.tf_coords[j];
    const Block& bj = g.blocks[cj.block];
    for (std::size_t i = 0; i < lay.tf_coords.size(); ++i) {
      const Rational& c = phi.tf(i, j);
      if (c == 0) continue;
      const Coord& ci = lay.tf_coords[i];
      for (const auto& t : psi.tau) {
        if (t.source != ci) continue;
        Prime p = g.blocks[t.target.block].p;
        Rational s = t.scale * c;
        if (bj.has_prime_in_pi(p)) {
          out.tau.push_back(TauEntry{cj, t.target, s});
        } else {
          // Q^pi -> Z(p^inf) with p outside pi has finite image.
          Element img = make_element(g, {{t.target, p_primary_part(s, p)}});
          if (!img.is_zero()) out.fin.push_back(FinEntry{cj, element_order(g, img), img});
        }
      }
      for (const auto& f : psi.fin) {
        if (f.source != ci) continue;
        Integer w = f.modulus ? *f.modulus : *element_order(g, f.image);
        Element img = element_scale(g, f.image, rational_mod(c, w));
        if (!img.is_zero()) out.fin.push_back(FinEntry{cj, w, img});
      }
    }
    for (const auto& t : phi.tau) {
      if (t.source != cj) continue;
      Prime p = g.blocks[t.target.block].p;
      const DivAction& d = psi.div.at(p);
      if (d.scalar_form) {
        out.tau.push_back(TauEntry{cj, t.target, d.scalar * t.scale});
      } else {
        const auto& coords = lay.prufer_coords.at(p);
        std::size_t col = position(coords, t.target);
        for (std::size_t r = 0; r < coords.size(); ++r)
          if (d.matrix(r, col) != 0) out.tau.push_back(TauEntry{cj, coords[r], d.matrix(r, col) * t.scale});
      }
    }
    for (const auto& f : phi.fin) {
      if (f.source != cj) continue;
      Element img = apply(psi, f.image);
      if (!img.is_zero()) out.fin.push_back(FinEntry{cj, f.modulus, img});
    }
  }
  return normalize(out);
}

bool equal(const Endo& phi, const Endo& psi) {
  if (!(phi.g() == psi.g())) return false;
  Endo a = normalize(phi), b = normalize(psi);
  return a.tf == b.tf && a.free_scalar == b.free_scalar && a.div == b.div && a.cyc == b.cyc && a.fin == b.fin &&
         a.tau == b.tau;
}

bool close(const Endo& phi, const Endo& psi) { return is_finitary(sub(phi, psi)); }

// ---------------------------------------------------------------------------
// Predicates

bool is_bounded(const Endo& phi) {
  Endo n = normalize(phi);
  if (!n.tf.is_zero() || n.free_scalar != 0 || !n.tau.empty()) return false;
  for (const auto& [p, d] : n.div)
    if (d.scalar != 0 || !d.matrix.is_zero()) return false;
  return true;
}

bool is_finitary(const Endo& phi) {
  if (!is_bounded(phi)) return false;
  Endo n = normalize(phi);
  for (std::size_t b = 0; b < n.cyc.size(); ++b)
    if (n.g().blocks[b].kind == BlockKind::Cyclic && !n.g().blocks[b].mult && n.cyc[b] != 0) return false;
  return true;
}

namespace {

/// Single rational acting on every finite-rank torsion-free copy and the
/// free block; nullopt if the action is not scalar there.
std::optional<Rational> torsion_free_scalar(const Endo& phi) {
  Layout lay(phi.g());
  std::optional<Rational> r;
  if (phi.tf.rows() > 0) {
    Rational v;
    if (!is_scalar_matrix(phi.tf, v)) return std::nullopt;
    r = v;
  }
  if (lay.free_block) {
    if (r && *r != Rational(phi.free_scalar)) return std::nullopt;
    r = Rational(phi.free_scalar);
  }
  return r;
}

std::optional<Rational> div_scalar(const DivAction& d) {
  if (d.scalar_form) return d.scalar;
  Rational v;
  if (!is_scalar_matrix(d.matrix, v)) return std::nullopt;
  return v;
}

/// One p-adic value acting on the Prufer p-blocks and on the selected cyclic
/// p-blocks (all of them, or only omega ones), if it exists.
std::optional<Rational> prime_scalar(const Endo& phi, Prime p, bool include_finite) {
  const GroupDesc& g = phi.g();
  std::optional<Rational> prufer;
  if (auto it = phi.div.find(p); it != phi.div.end()) {
    prufer = div_scalar(it->second);
    if (!prufer) return std::nullopt;
  }
  std::vector<Congruence> congruences;
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind != BlockKind::Cyclic || blk.p != p) continue;
    if (blk.mult && !include_finite) continue;
    congruences.push_back(Congruence{phi.cyc[b], block_modulus(blk)});
  }
  if (prufer) {
    for (const auto& c : congruences)
      if (mod_floor(c.residue - rational_mod(*prufer, c.modulus), c.modulus) != 0) return std::nullopt;
    return prufer;
  }
  if (congruences.empty()) return Rational(0);
  auto sol = crt_solve(congruences);
  if (!sol) return std::nullopt;
  return Rational(sol->value);
}

JElement j_from_values(const std::map<Prime, Rational>& values) {
  std::optional<Rational> common;
  bool uniform = true;
  for (const auto& [p, v] : values) {
    if (!common)
      common = v;
    else if (*common != v)
      uniform = false;
  }
  if (uniform && common && common->get_den() == 1) return JElement(common->get_num());
  return JElement(0, values);
}

bool all_exact(const Endo& n) { return n.fin.empty() && n.tau.empty(); }

/// CRT of exact block scalars over all cyclic blocks with primes in pi.
std::optional<Integer> integer_on_blocks(const Endo& n, const std::vector<Prime>& pi) {
  const GroupDesc& g = n.g();
  std::vector<Congruence> across;
  for (Prime p : pi) {
    std::vector<Congruence> local;
    for (std::size_t b = 0; b < g.blocks.size(); ++b) {
      const Block& blk = g.blocks[b];
      if (blk.kind == BlockKind::Cyclic && blk.p == p) local.push_back(Congruence{n.cyc[b], block_modulus(blk)});
    }
    if (local.empty()) continue;
    auto sol = crt_solve(local);
    if (!sol) return std::nullopt;
    across.push_back(Congruence{sol->value, sol->modulus()});
  }
  return crt_coprime(across);
}

/// Shared core of quasi/semi extraction on non-periodic groups: the scalar
/// alpha from A/T(A), the prime set where the cyclic action deviates, and
/// the integer on those blocks. `allowed` bounds the prime set.
template <typename Allowed>
std::optional<std::tuple<Integer, std::vector<Prime>, Rational>> split_shape(const Endo& n, Allowed allowed) {
  const GroupDesc& g = n.g();
  if (!all_exact(n)) return std::nullopt;
  auto q = torsion_free_scalar(n);
  if (!q) return std::nullopt;
  for (const auto& [p, d] : n.div) {
    auto v = div_scalar(d);
    if (!v || *v != *q) return std::nullopt;
  }
  std::set<Prime> pi;
  for (Prime p : prime_divisors(q->get_den())) pi.insert(p);
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind != BlockKind::Cyclic || pi.count(blk.p)) continue;
    if (!is_p_integral(*q, blk.p) || n.cyc[b] != rational_mod(*q, block_modulus(blk))) pi.insert(blk.p);
  }
  for (Prime p : pi)
    if (!allowed(p)) return std::nullopt;
  std::vector<Prime> piv(pi.begin(), pi.end());
  auto r = integer_on_blocks(n, piv);
  if (!r) return std::nullopt;
  return std::make_tuple(*r, piv, *q);
}

}  // namespace

std::optional<MultValue> is_multiplication(const Endo& phi) {
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  if (!all_exact(n)) return std::nullopt;
  if (g.is_periodic()) {
    std::map<Prime, Rational> values;
    for (Prime p : g.primes()) {
      auto v = prime_scalar(n, p, true);
      if (!v) return std::nullopt;
      values[p] = *v;
    }
    return MultValue(j_from_values(values));
  }
  auto r = torsion_free_scalar(n);
  if (!r) return std::nullopt;
  for (const auto& [p, d] : n.div) {
    auto v = div_scalar(d);
    if (!v || *v != *r) return std::nullopt;
  }
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind != BlockKind::Cyclic) continue;
    if (!is_p_integral(*r, blk.p) || n.cyc[b] != rational_mod(*r, block_modulus(blk))) return std::nullopt;
  }
  // pi(denominator) must consist of primes p with A p-divisible and p-torsion-free
  for (Prime p : prime_divisors(r->get_den())) {
    for (const auto& blk : g.blocks) {
      if (blk.is_torsion() && blk.p == p) return std::nullopt;
      if (blk.is_torsion_free() && !blk.has_prime_in_pi(p)) return std::nullopt;
    }
  }
  return MultValue(*r);
}

std::optional<FmSplit> fm_split(const Endo& phi) {
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  if (!n.tau.empty()) return std::nullopt;
  Endo qm = Endo::zero(n.group);
  if (g.is_periodic()) {
    std::map<Prime, Rational> values;
    for (Prime p : g.primes()) {
      auto v = prime_scalar(n, p, false);
      if (!v) return std::nullopt;
      values[p] = *v;
    }
    qm = multiplication(n.group, j_from_values(values));
  } else {
    auto q = torsion_free_scalar(n);
    if (!q) return std::nullopt;
    for (const auto& [p, d] : n.div) {
      auto v = div_scalar(d);
      if (!v || *v != *q) return std::nullopt;
    }
    for (std::size_t b = 0; b < g.blocks.size(); ++b) {
      const Block& blk = g.blocks[b];
      if (blk.kind != BlockKind::Cyclic || blk.mult) continue;
      if (!is_p_integral(*q, blk.p) || n.cyc[b] != rational_mod(*q, block_modulus(blk))) return std::nullopt;
    }
    auto pi = prime_divisors(q->get_den());
    Invariants inv = invariants(g);
    for (Prime p : pi)
      if (!inv.pi0.contains(p)) return std::nullopt;
    qm = semi_multiplication(n.group, 0, pi, *q);
  }
  Endo fin = sub(n, qm);
  if (!is_finitary(fin)) return std::nullopt;
  return FmSplit{fin, qm};
}

EndoClass classify(const Endo& phi) {
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  EndoClass out;
  out.finitary = is_finitary(n);
  out.multiplication = is_multiplication(n);
  out.fm = fm_split(n).has_value();

  if (g.is_periodic()) {
    if (out.multiplication) {
      out.quasi = QuasiParams{0, {}, *out.multiplication};
      out.semi = SemiParams{0, {}, *out.multiplication};
    }
  } else {
    Invariants inv = invariants(g);
    if (auto s = split_shape(n, [&](Prime p) { return inv.pi0.contains(p); }))
      out.quasi = QuasiParams{std::get<0>(*s), std::get<1>(*s), MultValue(std::get<2>(*s))};
    if (auto s = split_shape(n, [&](Prime p) { return inv.pi_star.contains(p); }))
      out.semi = SemiParams{std::get<0>(*s), std::get<1>(*s), MultValue(std::get<2>(*s))};
  }

  // mini: n on the cyclic pi-blocks, zero elsewhere, finite Prufer rank on pi
  bool zero_elsewhere = all_exact(n) && n.tf.is_zero() && n.free_scalar == 0;
  for (const auto& [p, d] : n.div)
    if (d.scalar != 0 || !d.matrix.is_zero()) zero_elsewhere = false;
  if (zero_elsewhere) {
    std::set<Prime> pi;
    for (std::size_t b = 0; b < g.blocks.size(); ++b)
      if (g.blocks[b].kind == BlockKind::Cyclic && n.cyc[b] != 0) pi.insert(g.blocks[b].p);
    Invariants inv = invariants(g);
    bool finite_rank = std::all_of(pi.begin(), pi.end(), [&](Prime p) { return inv.at(p).d.has_value(); });
    std::vector<Prime> piv(pi.begin(), pi.end());
    if (finite_rank)
      if (auto r = integer_on_blocks(n, piv)) out.mini = MiniParams{*r, piv};
  }
  return out;
}

}  // namespace endoring
