#include "endoring/oracle.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <random>
#include <set>

#include "endoring/plocal.hpp"

namespace endoring {

std::string to_string(const IndexValue& v) { return v ? v->get_str() : std::string("inf"); }

bool index_less(const IndexValue& a, const IndexValue& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

std::string to_string(Hint h) {
  switch (h) {
    case Hint::Stable: return "stable";
    case Hint::Growing: return "growing";
    case Hint::Indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

Integer lcm_int(const Integer& a, const Integer& b) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

Coord coord(std::size_t block, std::uint64_t copy) { return Coord{static_cast<std::uint32_t>(block), copy}; }

std::uint64_t copies(const Block& b, std::uint64_t limit) { return b.mult ? std::min<std::uint64_t>(*b.mult, limit) : limit; }

/// Element of order p^m on copy i of a torsion block (m <= k for cyclic).
Element of_order(const GroupDesc& g, std::size_t b, std::uint64_t i, unsigned m) {
  const Block& blk = g.blocks[b];
  if (blk.kind == BlockKind::Prufer) return make_element(g, {{coord(b, i), make_rational(1, ipow(blk.p, m))}});
  return make_element(g, {{coord(b, i), Rational(ipow(blk.p, blk.k - std::min(m, blk.k)))}});
}

unsigned top_order(const Block& b, unsigned n) { return b.kind == BlockKind::Prufer ? n : b.k; }

Element sum(const GroupDesc& g, const Element& a, const Element& b) { return element_add(g, a, b); }

}  // namespace

// ---------------------------------------------------------------------------
// Index computations

IndexValue index_in_sum(const FGSubgroup& h, const Endo& phi) {
  const GroupDesc& g = *h.group;
  std::vector<Element> images;
  for (const auto& x : h.generators) images.push_back(apply(phi, x));

  std::map<Coord, Integer> scale;
  for (const std::vector<Element>* list : {&h.generators, static_cast<const std::vector<Element>*>(&images)})
    for (const auto& x : *list)
      for (const auto& [c, v] : x.coeffs) {
        auto [it, fresh] = scale.emplace(c, Integer(1));
        it->second = lcm_int(it->second, v.get_den());
      }
  if (scale.empty()) return Integer(1);
  std::vector<Coord> coords;
  for (const auto& [c, s] : scale) coords.push_back(c);

  auto row_of = [&](const Element& x) {
    std::vector<Integer> row(coords.size(), 0);
    for (std::size_t j = 0; j < coords.size(); ++j) {
      auto it = x.coeffs.find(coords[j]);
      if (it != x.coeffs.end()) {
        Rational v = it->second * Rational(scale[coords[j]]);
        row[j] = v.get_num();
      }
    }
    return row;
  };
  std::vector<std::vector<Integer>> relations;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const Block& b = g.blocks[coords[j].block];
    if (!b.is_torsion()) continue;
    std::vector<Integer> row(coords.size(), 0);
    row[j] = b.kind == BlockKind::Cyclic ? ipow(b.p, b.k) : scale[coords[j]];
    relations.push_back(std::move(row));
  }
  auto build = [&](bool with_images) {
    std::vector<std::vector<Integer>> rows = relations;
    for (const auto& x : h.generators) rows.push_back(row_of(x));
    if (with_images)
      for (const auto& x : images) rows.push_back(row_of(x));
    IntMatrix m(rows.size(), coords.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < coords.size(); ++j) m(i, j) = rows[i][j];
    return smith_invariants(m);
  };
  auto inv_h = build(false);
  auto inv_k = build(true);
  if (inv_h.size() != inv_k.size()) return std::nullopt;
  Integer ph = 1, pk = 1;
  for (const auto& d : inv_h) ph *= d;
  for (const auto& d : inv_k) pk *= d;
  return Integer(ph / pk);
}

namespace {

/// Finite group elements as mixed-radix codes.
struct Codec {
  std::vector<Coord> coords;
  std::vector<std::uint64_t> moduli;
  std::uint64_t order = 1;

  explicit Codec(const GroupDesc& g) {
    if (!g.is_finite()) throw UsageError("group is not finite");
    for (std::size_t b = 0; b < g.blocks.size(); ++b)
      for (std::uint64_t c = 0; c < *g.blocks[b].mult; ++c) {
        coords.push_back(coord(b, c));
        std::uint64_t m = ipow(g.blocks[b].p, g.blocks[b].k).get_ui();
        moduli.push_back(m);
        if (order > (std::uint64_t(1) << 24) / m) throw UsageError("group too large to enumerate");
        order *= m;
      }
  }
  std::uint64_t encode(const Element& x) const {
    std::uint64_t code = 0;
    for (std::size_t i = coords.size(); i-- > 0;) {
      auto it = x.coeffs.find(coords[i]);
      std::uint64_t v = it == x.coeffs.end() ? 0 : it->second.get_num().get_ui();
      code = code * moduli[i] + v;
    }
    return code;
  }
  Element decode(const GroupDesc& g, std::uint64_t code) const {
    std::map<Coord, Rational> raw;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      std::uint64_t v = code % moduli[i];
      code /= moduli[i];
      if (v) raw[coords[i]] = Rational(Integer(static_cast<unsigned long>(v)));
    }
    return make_element(g, raw);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t out = 0, place = 1;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      std::uint64_t x = a % moduli[i], y = b % moduli[i];
      a /= moduli[i];
      b /= moduli[i];
      out += ((x + y) % moduli[i]) * place;
      place *= moduli[i];
    }
    return out;
  }
};

std::size_t closure_size(const Codec& codec, const std::vector<std::uint64_t>& gens) {
  std::vector<bool> seen(codec.order, false);
  std::vector<std::uint64_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::uint64_t x = stack.back();
    stack.pop_back();
    for (auto gcode : gens) {
      std::uint64_t y = codec.add(x, gcode);
      if (!seen[y]) {
        seen[y] = true;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count;
}

}  // namespace

Integer naive_index(const FGSubgroup& h, const Endo& phi) {
  const GroupDesc& g = *h.group;
  Codec codec(g);
  if (codec.order > 4096) throw UsageError("naive index limited to groups of order <= 2^12");
  std::vector<std::uint64_t> hs, ks;
  for (const auto& x : h.generators) {
    hs.push_back(codec.encode(x));
    ks.push_back(codec.encode(x));
    ks.push_back(codec.encode(apply(phi, x)));
  }
  return Integer(static_cast<unsigned long>(closure_size(codec, ks) / closure_size(codec, hs)));
}

std::vector<FGSubgroup> enumerate_all_subgroups(GroupRef finite, std::size_t budget) {
  const GroupDesc& g = *finite;
  Codec codec(g);
  using Members = std::vector<bool>;
  struct Node {
    Members members;
    std::vector<std::uint64_t> gens;
  };
  std::set<Members> seen;
  std::vector<Node> order;
  Members trivial(codec.order, false);
  trivial[0] = true;
  seen.insert(trivial);
  order.push_back(Node{trivial, {}});
  for (std::size_t at = 0; at < order.size(); ++at) {
    for (std::uint64_t x = 1; x < codec.order; ++x) {
      if (order[at].members[x]) continue;
      Members next = order[at].members;
      // <S, x> = union of cosets S + j x
      std::vector<std::uint64_t> base;
      for (std::uint64_t s = 0; s < codec.order; ++s)
        if (next[s]) base.push_back(s);
      std::uint64_t shift = x;
      while (!order[at].members[shift]) {
        for (auto s : base) next[codec.add(s, shift)] = true;
        shift = codec.add(shift, x);
      }
      if (seen.insert(next).second) {
        if (seen.size() > budget) throw UsageError("subgroup enumeration budget exceeded");
        auto gens = order[at].gens;
        gens.push_back(x);
        order.push_back(Node{std::move(next), std::move(gens)});
      }
    }
  }
  std::vector<FGSubgroup> out;
  for (const auto& node : order) {
    FGSubgroup s{finite, {}, "all"};
    for (auto c : node.gens) s.generators.push_back(codec.decode(g, c));
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<FGSubgroup> systematic_families(GroupRef gref, unsigned n) {
  const GroupDesc& g = *gref;
  std::vector<FGSubgroup> out;
  auto add = [&](std::string name, std::vector<Element> gens) {
    std::erase_if(gens, [](const Element& e) { return e.is_zero(); });
    if (!gens.empty()) out.push_back(FGSubgroup{gref, std::move(gens), std::move(name)});
  };
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (!blk.is_torsion()) continue;
    unsigned top = top_order(blk, n);
    add("unit:" + blk.name, {of_order(g, b, 0, top)});
    std::vector<Element> socle;
    for (std::uint64_t i = 0; i < copies(blk, n); ++i) socle.push_back(of_order(g, b, i, 1));
    add("socle:" + blk.name, socle);
    if (copies(blk, n) >= 2) add("pair:" + blk.name, {sum(g, of_order(g, b, 0, top), of_order(g, b, 1, top))});
  }
  for (std::size_t b1 = 0; b1 < g.blocks.size(); ++b1)
    for (std::size_t b2 = 0; b2 < g.blocks.size(); ++b2) {
      const Block& x = g.blocks[b1];
      const Block& y = g.blocks[b2];
      if (b1 == b2 || !x.is_torsion() || !y.is_torsion() || x.p != y.p) continue;
      unsigned t1 = top_order(x, n), t2 = top_order(y, n);
      unsigned m = std::min(t1, t2);
      std::uint64_t c = std::min(copies(x, n), copies(y, n));
      if (b1 < b2) {
        std::vector<Element> diag;
        for (std::uint64_t i = 0; i < c; ++i) diag.push_back(sum(g, of_order(g, b1, i, m), of_order(g, b2, i, m)));
        add("diag:" + x.name + "+" + y.name, diag);
        add("graph:" + x.name + "+" + y.name, {sum(g, of_order(g, b1, 0, m), of_order(g, b2, 0, m))});
      }
      if (t1 > t2) {
        std::vector<Element> mixed;
        for (std::uint64_t i = 0; i < c; ++i) mixed.push_back(sum(g, of_order(g, b1, i, t1), of_order(g, b2, i, t2)));
        add("mixed:" + x.name + "+" + y.name, mixed);
      }
    }
  return out;
}

namespace {

/// Level-independent subgroups meeting the torsion-free blocks.
std::vector<FGSubgroup> torsion_free_families(GroupRef gref) {
  const GroupDesc& g = *gref;
  std::vector<FGSubgroup> out;
  auto add = [&](std::string name, std::vector<Element> gens) {
    out.push_back(FGSubgroup{gref, std::move(gens), std::move(name)});
  };
  std::vector<std::pair<std::size_t, std::uint64_t>> tf;
  for (std::size_t b = 0; b < g.blocks.size(); ++b)
    if (g.blocks[b].is_torsion_free())
      for (std::uint64_t i = 0; i < copies(g.blocks[b], 2); ++i) tf.emplace_back(b, i);
  for (const auto& [b, i] : tf) {
    const Block& blk = g.blocks[b];
    Element e = unit_element(g, coord(b, i));
    std::string nm = blk.name + "." + std::to_string(i);
    add("tf:" + nm, {e});
    for (Prime p : blk.pi) add("tf/" + std::to_string(p) + ":" + nm, {make_element(g, {{coord(b, i), make_rational(1, p)}})});
    for (std::size_t t = 0; t < g.blocks.size(); ++t) {
      const Block& tb = g.blocks[t];
      if (!tb.is_torsion()) continue;
      add("tfgraph:" + nm + "+" + tb.name, {sum(g, e, of_order(g, t, 0, top_order(tb, 1)))});
    }
  }
  for (std::size_t a = 0; a < tf.size(); ++a)
    for (std::size_t b = a + 1; b < tf.size(); ++b)
      add("tfpair", {sum(g, unit_element(g, coord(tf[a].first, tf[a].second)), unit_element(g, coord(tf[b].first, tf[b].second)))});
  return out;
}

Element random_element(const GroupDesc& g, std::mt19937_64& rng, bool torsion_only, unsigned copy_limit, unsigned depth) {
  std::vector<std::size_t> blocks;
  for (std::size_t b = 0; b < g.blocks.size(); ++b)
    if (!torsion_only || g.blocks[b].is_torsion()) blocks.push_back(b);
  if (blocks.empty()) return Element{};
  std::map<Coord, Rational> raw;
  std::size_t support = 1 + rng() % 3;
  for (std::size_t s = 0; s < support; ++s) {
    std::size_t b = blocks[rng() % blocks.size()];
    const Block& blk = g.blocks[b];
    Coord c = coord(b, rng() % copies(blk, copy_limit));
    switch (blk.kind) {
      case BlockKind::Cyclic:
        raw[c] += Rational(Integer(static_cast<unsigned long>(rng() % ipow(blk.p, blk.k).get_ui())));
        break;
      case BlockKind::Prufer: {
        unsigned j = 1 + static_cast<unsigned>(rng() % depth);
        Integer den = ipow(blk.p, j);
        raw[c] += make_rational(Integer(static_cast<unsigned long>(rng() % den.get_ui())), den);
        break;
      }
      case BlockKind::TorsionFree: {
        Integer den = 1;
        if (!blk.pi.empty()) den = ipow(blk.pi[rng() % blk.pi.size()], static_cast<unsigned>(rng() % (depth + 1)));
        raw[c] += make_rational(Integer(static_cast<long>(rng() % 7) - 3), den);
        break;
      }
      case BlockKind::FreeOmega:
        raw[c] += Rational(Integer(static_cast<long>(rng() % 7) - 3));
        break;
    }
  }
  return make_element(g, raw);
}

std::vector<FGSubgroup> random_subgroups(GroupRef gref, std::size_t count, std::uint64_t seed, bool torsion_only,
                                         unsigned copy_limit, unsigned depth) {
  std::mt19937_64 rng(seed);
  std::vector<FGSubgroup> out;
  for (std::size_t s = 0; s < count; ++s) {
    FGSubgroup h{gref, {}, "random"};
    std::size_t ngens = 1 + rng() % 4;
    for (std::size_t i = 0; i < ngens; ++i) {
      Element e = random_element(*gref, rng, torsion_only, copy_limit, depth);
      if (!e.is_zero()) h.generators.push_back(std::move(e));
    }
    if (!h.generators.empty()) out.push_back(std::move(h));
  }
  return out;
}

}  // namespace

std::vector<FGSubgroup> sample_subgroups(GroupRef g, std::size_t count, std::uint64_t seed, unsigned copy_limit,
                                         unsigned depth) {
  std::vector<FGSubgroup> out = systematic_families(g, copy_limit);
  auto tf = torsion_free_families(g);
  out.insert(out.end(), tf.begin(), tf.end());
  auto rnd = random_subgroups(g, count, seed, false, copy_limit, depth);
  out.insert(out.end(), rnd.begin(), rnd.end());
  return out;
}

// ---------------------------------------------------------------------------
// Truncations

unsigned required_prufer_depth(const Endo& phi) {
  unsigned depth = 0;
  for (const auto& f : phi.fin)
    for (const auto& [c, v] : f.image.coeffs) {
      const Block& b = phi.g().blocks[c.block];
      if (b.kind == BlockKind::Prufer && v != 0) depth = std::max(depth, valuation(v.get_den(), b.p));
    }
  return depth;
}

namespace {

Element project(const Truncation& t, const GroupDesc& original, const Element& y) {
  std::map<Coord, Rational> kept;
  for (const auto& [c, v] : y.coeffs) {
    const Block& b = original.blocks[c.block];
    if (b.is_torsion_free()) continue;
    if (!b.mult && c.copy >= t.level) continue;
    kept[c] = v;
  }
  auto r = t.restrict(make_element(original, kept), original);
  if (!r) throw UsageError("image does not fit the truncation");
  return *r;
}

std::vector<Element> restrict_all(const Truncation& t, const GroupDesc& original, const std::vector<Element>& gens) {
  std::vector<Element> out;
  for (const auto& x : gens) {
    auto r = t.restrict(x, original);
    if (r && !r->is_zero()) out.push_back(std::move(*r));
  }
  return out;
}

}  // namespace

TruncatedEndo truncate_endo(const Endo& phi, unsigned level) {
  const GroupDesc& g = phi.g();
  Truncation t = truncate(g, level, std::nullopt, required_prufer_depth(phi));
  auto tg = std::make_shared<const GroupDesc>(t.group);
  Endo e = Endo::zero(tg);
  for (std::size_t b = 0; b < tg->blocks.size(); ++b)
    for (std::uint64_t c = 0; c < *tg->blocks[b].mult; ++c) {
      Element y = apply(phi, t.lift(unit_element(*tg, coord(b, c)), g));
      e.fin.push_back(FinEntry{coord(b, c), std::nullopt, project(t, g, y)});
    }
  return TruncatedEndo{t, tg, normalize(e)};
}

// ---------------------------------------------------------------------------
// Profiles

namespace {

Hint level_hint(const std::vector<IndexValue>& values) {
  if (values.size() < 2) return Hint::Indeterminate;
  bool growing = true;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!index_less(values[i - 1], values[i])) growing = false;
  if (growing) return Hint::Growing;
  if (values[values.size() - 1] == values[values.size() - 2]) return Hint::Stable;
  return Hint::Indeterminate;
}

template <typename Measure>
std::vector<std::pair<Integer, std::string>> per_level_max(const Endo& phi, const std::vector<unsigned>& levels,
                                                           std::size_t samples, std::uint64_t seed, Measure measure) {
  const GroupDesc& g = phi.g();
  unsigned lo = levels.front();
  auto rnd = random_subgroups(phi.group, samples, seed, true, std::min(lo, 3u), lo);
  std::vector<std::pair<Integer, std::string>> out;
  for (unsigned n : levels) {
    TruncatedEndo te = truncate_endo(phi, n);
    Integer best = 1;
    std::string arg = "none";
    if (!te.group->blocks.empty()) {
      plocal::FiniteModel model(te.group);
      auto maps = plocal::primary_maps(model, te.phi);
      auto families = systematic_families(phi.group, n);
      families.insert(families.end(), rnd.begin(), rnd.end());
      for (const auto& h : families) {
        auto gens = restrict_all(te.trunc, g, h.generators);
        if (gens.empty()) continue;
        Integer v = measure(model, maps, gens);
        if (v > best) {
          best = v;
          arg = h.family;
        }
      }
    }
    out.emplace_back(best, arg);
  }
  return out;
}

}  // namespace

InertnessEvidence inertness_profile(const Endo& phi, const std::vector<unsigned>& levels_in, std::size_t samples,
                                    std::uint64_t seed) {
  std::vector<unsigned> levels = levels_in;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.empty() || levels.front() < 1) throw UsageError("levels must be positive");
  InertnessEvidence ev;
  auto maxima = per_level_max(phi, levels, samples, seed,
                              [](const plocal::FiniteModel& m, const std::vector<plocal::PrimaryMap>& maps,
                                 const std::vector<Element>& gens) { return plocal::index_in_sum(m, maps, gens); });
  std::vector<IndexValue> values;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ev.per_level.push_back(LevelRecord{levels[i], maxima[i].first, maxima[i].second});
    values.push_back(maxima[i].first);
  }
  for (const auto& h : systematic_families(phi.group, levels.back())) ev.sampled_families.push_back(h.family);

  auto untruncated = torsion_free_families(phi.group);
  auto rnd = random_subgroups(phi.group, std::max<std::size_t>(samples / 4, 8), seed ^ 0x9e3779b97f4a7c15ULL, false, 2, 2);
  untruncated.insert(untruncated.end(), rnd.begin(), rnd.end());
  ev.untruncated_max = Integer(1);
  ev.untruncated_argmax = "none";
  for (const auto& h : untruncated) {
    IndexValue v = index_in_sum(h, phi);
    if (index_less(ev.untruncated_max, v)) {
      ev.untruncated_max = v;
      ev.untruncated_argmax = h.family;
    }
  }
  for (const auto& h : torsion_free_families(phi.group)) ev.sampled_families.push_back(h.family);
  ev.hint = ev.untruncated_max ? level_hint(values) : Hint::Growing;
  return ev;
}

FsReport fs_profile(const Endo& phi, const std::vector<unsigned>& levels_in, std::size_t samples, std::uint64_t seed) {
  if (!phi.g().is_periodic()) throw UsageError("fs_profile needs a periodic group");
  std::vector<unsigned> levels = levels_in;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.empty() || levels.front() < 1) throw UsageError("levels must be positive");
  auto maxima = per_level_max(phi, levels, samples, seed,
                              [](const plocal::FiniteModel& m, const std::vector<plocal::PrimaryMap>& maps,
                                 const std::vector<Element>& gens) { return plocal::fs_ratio(m, maps, gens); });
  FsReport rep;
  std::vector<IndexValue> values;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    rep.per_level.emplace_back(levels[i], maxima[i].first);
    values.push_back(maxima[i].first);
  }
  rep.hint = level_hint(values);
  return rep;
}

// ---------------------------------------------------------------------------
// Witness search

namespace {

using Template = std::function<std::vector<Element>(unsigned)>;

struct Candidate {
  std::string name;
  Template make;
};

std::vector<Candidate> templates(const Endo& phi, const std::string& preferred) {
  const GroupDesc& g = phi.g();
  Layout lay(g);
  std::vector<Candidate> rank_jump, graph_chain, prufer_layer, diagonal, tf_layer, cyc_prufer, free_graph;

  std::vector<Coord> tf;
  for (std::size_t b = 0; b < g.blocks.size(); ++b)
    if (g.blocks[b].kind == BlockKind::TorsionFree)
      for (std::uint64_t i = 0; i < *g.blocks[b].mult; ++i) tf.push_back(coord(b, i));
  std::optional<Coord> f0;
  if (lay.free_block) f0 = coord(*lay.free_block, 0);

  for (std::size_t i = 0; i < tf.size(); ++i) {
    rank_jump.push_back({"rank-jump", [=, &g](unsigned) { return std::vector<Element>{unit_element(g, tf[i])}; }});
    for (std::size_t j = i + 1; j < tf.size(); ++j)
      rank_jump.push_back({"rank-jump", [=, &g](unsigned) {
                             return std::vector<Element>{element_add(g, unit_element(g, tf[i]), unit_element(g, tf[j]))};
                           }});
    if (f0)
      free_graph.push_back({"free-graph", [=, &g](unsigned) {
                              return std::vector<Element>{element_add(g, unit_element(g, *f0), unit_element(g, tf[i]))};
                            }});
  }

  for (std::size_t pb = 0; pb < g.blocks.size(); ++pb) {
    const Block& P = g.blocks[pb];
    if (P.kind != BlockKind::Prufer) continue;
    const Prime p = P.p;
    for (const Coord& c : tf) {
      if (!g.blocks[c.block].has_prime_in_pi(p)) continue;
      graph_chain.push_back({"graph-chain", [=, &g](unsigned n) {
                               Rational q = make_rational(1, ipow(p, n));
                               return std::vector<Element>{make_element(g, {{c, q}, {coord(pb, 0), q}})};
                             }});
      tf_layer.push_back({"tf-layer", [=, &g](unsigned n) {
                            return std::vector<Element>{make_element(g, {{c, make_rational(1, ipow(p, n))}})};
                          }});
      if (f0)
        free_graph.push_back({"free-graph", [=, &g](unsigned n) {
                                return std::vector<Element>{make_element(g, {{*f0, 1}, {c, make_rational(1, ipow(p, n))}})};
                              }});
    }
    std::uint64_t pc = copies(P, 2);
    for (std::uint64_t i = 0; i < pc; ++i) {
      prufer_layer.push_back({"prufer-layer", [=, &g](unsigned n) {
                                return std::vector<Element>{make_element(g, {{coord(pb, i), make_rational(1, ipow(p, n))}})};
                              }});
      if (f0)
        free_graph.push_back({"free-graph", [=, &g](unsigned n) {
                                return std::vector<Element>{
                                    make_element(g, {{*f0, 1}, {coord(pb, i), make_rational(1, ipow(p, n))}})};
                              }});
    }
    if (pc >= 2)
      prufer_layer.push_back({"prufer-layer", [=, &g](unsigned n) {
                                Rational q = make_rational(1, ipow(p, n));
                                return std::vector<Element>{make_element(g, {{coord(pb, 0), q}, {coord(pb, 1), q}})};
                              }});
  }
  // Prufer pairs across blocks of the same prime
  for (std::size_t a = 0; a < g.blocks.size(); ++a)
    for (std::size_t b = a + 1; b < g.blocks.size(); ++b) {
      const Block& A = g.blocks[a];
      const Block& B = g.blocks[b];
      if (A.kind != BlockKind::Prufer || B.kind != BlockKind::Prufer || A.p != B.p) continue;
      prufer_layer.push_back({"prufer-layer", [=, &g](unsigned n) {
                                Rational q = make_rational(1, ipow(A.p, n));
                                return std::vector<Element>{make_element(g, {{coord(a, 0), q}, {coord(b, 0), q}})};
                              }});
    }

  for (std::size_t a = 0; a < g.blocks.size(); ++a) {
    const Block& A = g.blocks[a];
    if (A.kind != BlockKind::Cyclic || A.mult) continue;
    for (std::size_t b = 0; b < g.blocks.size(); ++b) {
      const Block& B = g.blocks[b];
      if (b == a || B.p != A.p) continue;
      if (B.kind == BlockKind::Cyclic && !B.mult && (A.k < B.k || (A.k == B.k && a < b))) {
        diagonal.push_back({"diagonal-pairs", [=, &g](unsigned n) {
                              std::vector<Element> gens;
                              for (unsigned i = 0; i < n; ++i)
                                gens.push_back(make_element(g, {{coord(a, i), 1}, {coord(b, i), Rational(ipow(A.p, B.k - A.k))}}));
                              return gens;
                            }});
      }
      if (B.kind == BlockKind::Prufer) {
        cyc_prufer.push_back({"cyclic-prufer-pairs", [=, &g](unsigned n) {
                                std::vector<Element> gens;
                                for (unsigned i = 0; i < std::min<std::uint64_t>(n, copies(B, n)); ++i)
                                  gens.push_back(make_element(g, {{coord(a, i), 1}, {coord(b, i), make_rational(1, ipow(A.p, A.k))}}));
                                return gens;
                              }});
      }
    }
    if (f0)
      free_graph.push_back({"free-graph", [=, &g](unsigned n) {
                              std::vector<Element> gens;
                              for (unsigned i = 0; i < n; ++i)
                                gens.push_back(make_element(g, {{coord(f0->block, i), 1}, {coord(a, i), 1}}));
                              return gens;
                            }});
  }

  std::vector<std::pair<std::string, std::vector<Candidate>*>> groups = {
      {"rank-jump", &rank_jump},       {"graph-chain", &graph_chain},
      {"prufer-layer", &prufer_layer}, {"diagonal-pairs", &diagonal},
      {"tf-layer", &tf_layer},         {"cyclic-prufer-pairs", &cyc_prufer},
      {"free-graph", &free_graph}};
  std::vector<Candidate> out;
  for (auto& [name, list] : groups)
    if (name == preferred) out.insert(out.end(), list->begin(), list->end());
  for (auto& [name, list] : groups)
    if (name != preferred) out.insert(out.end(), list->begin(), list->end());
  return out;
}

bool unbounded(const std::vector<std::pair<unsigned, IndexValue>>& seq) {
  for (const auto& [n, v] : seq)
    if (!v) return true;
  if (seq.size() < 3) return false;
  for (std::size_t i = seq.size() - 2; i < seq.size(); ++i)
    if (!index_less(seq[i - 1].second, seq[i].second)) return false;
  return true;
}

}  // namespace

std::optional<WitnessFamily> witness_search(const Endo& phi, const Violation& v, unsigned budget) {
  if (budget < 3) budget = 3;
  for (const auto& cand : templates(phi, v.hint)) {
    WitnessFamily fam;
    fam.name = cand.name;
    for (unsigned n = 1; n <= budget; ++n) {
      FGSubgroup h{phi.group, cand.make(n), cand.name};
      IndexValue idx = index_in_sum(h, phi);
      fam.indices.emplace_back(n, idx);
      fam.members.push_back(std::move(h));
      if (!idx) break;
    }
    if (unbounded(fam.indices)) {
      fam.unbounded = true;
      return fam;
    }
  }
  return std::nullopt;
}

}  // namespace endoring
