#include "endoring/corpus.hpp"

#include <algorithm>
#include <filesystem>

#include "endoring/textformat.hpp"

#ifndef ENDORING_CORPUS_DIR
#define ENDORING_CORPUS_DIR "corpus"
#endif

namespace endoring {

namespace {

constexpr const char* kGroups = R"(
group Z2w { block B = cyclic(p=2, k=1, mult=omega) }
group C3mix { block B1 = cyclic(p=3, k=1, mult=omega) block B2 = cyclic(p=3, k=2, mult=omega) }
group Crit2 { block B = cyclic(p=2, k=2, mult=omega) block D = prufer(p=2, copies=1) }
group PF3 { block B = cyclic(p=3, k=1, mult=omega) block E = cyclic(p=3, k=2, mult=1) }
group Pr2 { block D = prufer(p=2, copies=2) }
group Pr3w { block D = prufer(p=3, copies=omega) block B = cyclic(p=3, k=1, mult=omega) }
group Multi { block B2 = cyclic(p=2, k=1, mult=omega) block B3 = cyclic(p=3, k=1, mult=omega) block D5 = prufer(p=5, copies=1) }
group Fm5 { block B = cyclic(p=5, k=1, mult=1) block C = torsionfree(pi={5}, rank=1) }
group CritTF { block B = cyclic(p=2, k=1, mult=omega) block C = torsionfree(pi={2}, rank=1) }
group Mixed3 { block B = cyclic(p=3, k=2, mult=omega) block D = prufer(p=3, copies=1) block Z = torsionfree(pi={}, rank=1) }
group Z2 { block C = torsionfree(pi={}, rank=2) }
group NonFTFR { block F = torsionfree(pi={}, rank=omega) block B = cyclic(p=2, k=1, mult=omega) block D = prufer(p=3, copies=1) }
group Loc23 { block C = torsionfree(pi={2,3}, rank=2) block D = prufer(p=2, copies=1) block B = cyclic(p=3, k=1, mult=omega) block E = cyclic(p=5, k=1, mult=2) }
group Fin2 { block B = cyclic(p=2, k=1, mult=3) block E = cyclic(p=2, k=3, mult=2) }
)";

template <typename T>
T pick(std::mt19937_64& rng, T lo, T hi) {
  return std::uniform_int_distribution<T>(lo, hi)(rng);
}

Integer block_order(const Block& b) { return ipow(b.p, b.k); }

void add_fin(Endo& e, std::mt19937_64& rng, std::size_t entries) {
  const GroupDesc& g = e.g();
  std::vector<Coord> sources;
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind != BlockKind::Cyclic && blk.kind != BlockKind::TorsionFree) continue;
    std::uint64_t limit = blk.mult ? std::min<std::uint64_t>(*blk.mult, 2) : 2;
    for (std::uint64_t c = 0; c < limit; ++c) sources.push_back(Coord{static_cast<std::uint32_t>(b), c});
  }
  std::vector<Prime> torsion_primes;
  for (const auto& blk : g.blocks)
    if (blk.is_torsion()) torsion_primes.push_back(blk.p);
  std::sort(torsion_primes.begin(), torsion_primes.end());
  torsion_primes.erase(std::unique(torsion_primes.begin(), torsion_primes.end()), torsion_primes.end());
  if (sources.empty() || torsion_primes.empty()) return;
  for (std::size_t i = 0; i < entries; ++i) {
    Coord src = sources[pick<std::size_t>(rng, 0, sources.size() - 1)];
    const Block& blk = g.blocks[src.block];
    FinEntry f;
    f.source = src;
    if (blk.kind == BlockKind::Cyclic) {
      f.image = random_torsion(g, blk.p, blk.k, rng);
    } else {
      std::vector<Prime> allowed;
      for (Prime q : torsion_primes)
        if (!blk.has_prime_in_pi(q)) allowed.push_back(q);
      if (allowed.empty()) continue;
      Prime q = allowed[pick<std::size_t>(rng, 0, allowed.size() - 1)];
      unsigned j = pick<unsigned>(rng, 1, 2);
      f.modulus = ipow(q, j);
      f.image = random_torsion(g, q, j, rng);
    }
    if (!f.image.is_zero()) e.fin.push_back(std::move(f));
  }
}

void randomize_finite_blocks(Endo& e, std::mt19937_64& rng) {
  for (std::size_t b = 0; b < e.g().blocks.size(); ++b) {
    const Block& blk = e.g().blocks[b];
    if (blk.kind == BlockKind::Cyclic && blk.mult)
      e.cyc[b] = mod_floor(Integer(pick<long>(rng, 0, 40)), block_order(blk));
  }
}

void set_div(Endo& e, Prime p, const Rational& alpha) {
  auto it = e.div.find(p);
  if (it == e.div.end()) return;
  DivAction& d = it->second;
  if (d.scalar_form) {
    d.scalar = alpha;
  } else {
    for (std::size_t i = 0; i < d.matrix.rows(); ++i) d.matrix(i, i) = alpha;
  }
}

void set_omega_cyclic(Endo& e, Prime p, const Rational& alpha) {
  for (std::size_t b = 0; b < e.g().blocks.size(); ++b) {
    const Block& blk = e.g().blocks[b];
    if (blk.kind == BlockKind::Cyclic && blk.p == p && !blk.mult) e.cyc[b] = rational_mod(alpha, block_order(blk));
  }
}

std::vector<Prime> torsion_primes(const GroupDesc& g) {
  std::vector<Prime> out;
  for (const auto& b : g.blocks)
    if (b.is_torsion()) out.push_back(b.p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<GroupRef> corpus_groups() {
  static const std::vector<GroupRef> groups = parse(kGroups).groups;
  return groups;
}

GroupRef corpus_group(const std::string& name) {
  for (const auto& g : corpus_groups())
    if (g->name == name) return g;
  throw UsageError("no corpus group named " + name);
}

Rational random_p_integral(Prime p, std::mt19937_64& rng) {
  static const long dens[] = {1, 1, 1, 2, 3, 5, 7};
  long den = dens[pick<std::size_t>(rng, 0, 6)];
  if (static_cast<Prime>(den) % p == 0) den = 1;
  return make_rational(Integer(pick<long>(rng, -4, 4)), Integer(den));
}

Element random_torsion(const GroupDesc& g, Prime p, unsigned k, std::mt19937_64& rng, std::uint64_t copy_limit) {
  std::map<Coord, Rational> raw;
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (!blk.is_torsion() || blk.p != p) continue;
    std::uint64_t limit = blk.mult ? std::min(*blk.mult, copy_limit) : copy_limit;
    for (std::uint64_t c = 0; c < limit; ++c) {
      if (pick<int>(rng, 0, 1) == 0) continue;
      Coord at{static_cast<std::uint32_t>(b), c};
      if (blk.kind == BlockKind::Cyclic) {
        unsigned j = std::min(k, blk.k);
        Integer a = pick<unsigned long>(rng, 0, ipow(p, j).get_ui() - 1);
        raw[at] = Rational(a * ipow(p, blk.k - j));
      } else {
        Integer q = ipow(p, k);
        raw[at] = make_rational(Integer(pick<unsigned long>(rng, 0, q.get_ui() - 1)), q);
      }
    }
  }
  return make_element(g, raw);
}

Endo random_finitary(GroupRef g, std::mt19937_64& rng, std::size_t entries) {
  Endo e = Endo::zero(std::move(g));
  randomize_finite_blocks(e, rng);
  add_fin(e, rng, entries);
  return normalize(e);
}

Endo random_inertial(GroupRef gref, std::mt19937_64& rng, bool with_fin) {
  const GroupDesc& g = *gref;
  Endo e = Endo::zero(gref);
  if (!g.has_ftfr()) {
    e = multiplication(gref, Rational(pick<long>(rng, -3, 3)));
    randomize_finite_blocks(e, rng);
    if (with_fin) add_fin(e, rng, 2);
    return normalize(e);
  }
  Invariants inv = invariants(g);
  Rational r = 0;
  if (!g.is_periodic()) {
    Integer den = 1;
    for (Prime p : inv.pi_star.exceptions)
      if (pick<int>(rng, 0, 2) == 0) den *= to_integer(p);
    r = make_rational(Integer(pick<long>(rng, -4, 4)), den);
    for (std::size_t i = 0; i < e.tf.rows(); ++i) e.tf(i, i) = r;
  }
  for (Prime p : torsion_primes(g)) {
    PrimeInvariants pi = inv.at(p);
    Rational alpha_div = 0;
    if (pi.d != Cardinal(0)) {
      alpha_div = pi.s_rank >= 1 ? r : random_p_integral(p, rng);
      set_div(e, p, alpha_div);
    }
    Rational alpha_cyc = !pi.d ? alpha_div : Rational(pick<long>(rng, 0, 30));
    set_omega_cyclic(e, p, alpha_cyc);
  }
  randomize_finite_blocks(e, rng);
  if (with_fin) add_fin(e, rng, 2);
  return normalize(e);
}

Endo random_uniform(GroupRef gref, std::mt19937_64& rng, bool with_fin) {
  const GroupDesc& g = *gref;
  if (!g.has_ftfr()) throw UnsupportedError("uniform endomorphisms need finite torsion-free rank");
  Endo e = Endo::zero(gref);
  Invariants inv = invariants(g);
  for (Prime p : torsion_primes(g)) {
    Rational beta = inv.at(p).s_rank >= 1 ? Rational(0) : random_p_integral(p, rng);
    set_div(e, p, beta);
    set_omega_cyclic(e, p, beta);
  }
  randomize_finite_blocks(e, rng);
  if (with_fin) add_fin(e, rng, 2);
  return normalize(e);
}

std::string corpus_dir() { return ENDORING_CORPUS_DIR; }

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir()))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace endoring
