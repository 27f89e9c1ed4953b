#include "endoring/inertia.hpp"

#include <algorithm>

namespace endoring {

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::TfNotScalar: return "TF_NOT_SCALAR";
    case ViolationKind::PiHasDivisible: return "PI_HAS_DIVISIBLE";
    case ViolationKind::DivNotScalar: return "DIV_NOT_SCALAR";
    case ViolationKind::CrtInconsistent: return "CRT_INCONSISTENT";
    case ViolationKind::DivVsRMismatch: return "DIV_VS_R_MISMATCH";
    case ViolationKind::TauNonzero: return "TAU_NONZERO";
    case ViolationKind::OmegaDivMismatch: return "OMEGA_DIV_MISMATCH";
    case ViolationKind::NotFtfrNotInteger: return "NOT_FTFR_NOT_INTEGER";
  }
  return "?";
}

namespace {

std::optional<Rational> scalar_of(const RatMatrix& m) {
  if (m.rows() == 0) return std::nullopt;
  Rational v = m(0, 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != (i == j ? v : Rational(0))) return std::nullopt;
  return v;
}

std::optional<Rational> div_scalar(const DivAction& d) { return d.scalar_form ? std::optional(d.scalar) : scalar_of(d.matrix); }

Integer modulus_of(const Block& b) { return ipow(b.p, b.k); }

std::vector<std::size_t> omega_cyclic_blocks(const GroupDesc& g, Prime p) {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < g.blocks.size(); ++b)
    if (g.blocks[b].kind == BlockKind::Cyclic && g.blocks[b].p == p && !g.blocks[b].mult) out.push_back(b);
  return out;
}

std::vector<std::string> blocks_of_prime(const GroupDesc& g, Prime p, BlockKind kind) {
  std::vector<std::string> out;
  for (const auto& b : g.blocks)
    if (b.kind == kind && b.p == p) out.push_back(b.name);
  return out;
}

std::vector<std::string> tf_block_names(const GroupDesc& g) {
  std::vector<std::string> out;
  for (const auto& b : g.blocks)
    if (b.is_torsion_free()) out.push_back(b.name);
  return out;
}

Violation violation(ViolationKind kind, std::vector<std::string> site, std::optional<Prime> p, std::string message) {
  static const std::map<ViolationKind, std::string> hints = {
      {ViolationKind::TfNotScalar, "rank-jump"},
      {ViolationKind::PiHasDivisible, "graph-chain"},
      {ViolationKind::DivNotScalar, "prufer-layer"},
      {ViolationKind::CrtInconsistent, "diagonal-pairs"},
      {ViolationKind::DivVsRMismatch, "graph-chain"},
      {ViolationKind::TauNonzero, "tf-layer"},
      {ViolationKind::OmegaDivMismatch, "cyclic-prufer-pairs"},
      {ViolationKind::NotFtfrNotInteger, "free-graph"},
  };
  return Violation{kind, std::move(site), p, hints.at(kind), std::move(message)};
}

std::string prime_str(Prime p) { return std::to_string(p); }

/// CRT over the omega cyclic p-blocks.
std::optional<std::optional<Residue>> omega_crt(const Endo& n, Prime p) {
  std::vector<Congruence> cs;
  for (std::size_t b : omega_cyclic_blocks(n.g(), p)) cs.push_back(Congruence{n.cyc[b], modulus_of(n.g().blocks[b])});
  if (cs.empty()) return std::optional<Residue>();
  auto sol = crt_solve(cs);
  if (!sol) return std::nullopt;
  return std::optional<Residue>(*sol);
}

Verdict check_not_ftfr(const Endo& n, InertialCertificate cert) {
  const GroupDesc& g = n.g();
  const Integer m = n.free_scalar;
  auto fail = [&](std::vector<std::string> site, std::optional<Prime> p, const std::string& what) -> Verdict {
    return violation(ViolationKind::NotFtfrNotInteger, std::move(site), p,
                     what + " does not act as the integer " + m.get_str() + " of the free block");
  };
  Layout lay(g);
  std::string free_name = g.blocks[*lay.free_block].name;
  for (std::size_t i = 0; i < n.tf.rows(); ++i)
    for (std::size_t j = 0; j < n.tf.cols(); ++j)
      if (n.tf(i, j) != (i == j ? Rational(m) : Rational(0)))
        return fail({free_name, g.blocks[lay.tf_coords[j].block].name}, std::nullopt, "torsion-free block");
  for (const auto& [p, d] : n.div) {
    auto a = div_scalar(d);
    if (!a || *a != Rational(m)) return fail({free_name}, p, "Prufer part at p=" + prime_str(p));
  }
  if (!n.tau.empty())
    return fail({free_name, g.blocks[n.tau.front().source.block].name}, g.blocks[n.tau.front().target.block].p, "tau part");
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const Block& blk = g.blocks[b];
    if (blk.kind != BlockKind::Cyclic || blk.mult) continue;
    if (n.cyc[b] != mod_floor(m, modulus_of(blk))) return fail({free_name, blk.name}, blk.p, "cyclic block " + blk.name);
  }
  cert.r = Rational(m);
  for (Prime p : g.primes()) {
    PrimeCertificate pc;
    if (!omega_cyclic_blocks(g, p).empty()) pc.alpha_cyc = Residue(m, p, invariants(g).at(p).eps_k);
    if (n.div.count(p)) pc.alpha_div = Rational(m);
    cert.per_prime[p] = pc;
  }
  return cert;
}

}  // namespace

Verdict is_inertial(const Endo& phi) {
  auto issues = validate(phi);
  if (!issues.empty()) throw UsageError("invalid endomorphism: " + issues.front());
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  InertialCertificate cert;
  for (const auto& b : g.blocks)
    if (b.kind == BlockKind::Cyclic && b.mult) cert.exempt_blocks.push_back(b.name);
  if (g.is_finite()) return cert;
  if (!g.has_ftfr()) return check_not_ftfr(n, cert);

  Invariants inv = invariants(g);
  // (1)
  if (!g.is_periodic()) {
    auto r = scalar_of(n.tf);
    if (!r)
      return violation(ViolationKind::TfNotScalar, tf_block_names(g), std::nullopt,
                       "action on A/T(A) is not a single rational");
    cert.r = *r;
    cert.pi = prime_divisors(r->get_den());
    // (2)
    for (Prime p : cert.pi)
      if (inv.at(p).d != Cardinal(0))
        return violation(ViolationKind::PiHasDivisible, blocks_of_prime(g, p, BlockKind::Prufer), p,
                         "denominator of r = " + to_string(*r) + " divisible by a Prufer prime");
  }
  // (3)
  std::map<Prime, Rational> alpha_div;
  for (const auto& [p, d] : n.div) {
    auto a = div_scalar(d);
    if (!a)
      return violation(ViolationKind::DivNotScalar, blocks_of_prime(g, p, BlockKind::Prufer), p,
                       "Prufer part at p=" + prime_str(p) + " is not a scalar");
    alpha_div[p] = *a;
  }
  // (4)
  if (cert.r) {
    for (const auto& [p, a] : alpha_div) {
      PrimeInvariants pi = inv.at(p);
      if (pi.s_rank >= 1 && a != *cert.r) {
        auto site = blocks_of_prime(g, p, BlockKind::Prufer);
        for (const auto& b : g.blocks)
          if (b.kind == BlockKind::TorsionFree && b.has_prime_in_pi(p)) site.push_back(b.name);
        return violation(ViolationKind::DivVsRMismatch, site, p,
                         "Prufer scalar " + to_string(a) + " differs from r = " + to_string(*cert.r));
      }
    }
  }
  // (5)
  if (!n.tau.empty()) {
    const auto& t = n.tau.front();
    return violation(ViolationKind::TauNonzero, {g.blocks[t.source.block].name, g.blocks[t.target.block].name},
                     g.blocks[t.target.block].p, "nonzero map from a torsion-free block into a Prufer block");
  }
  // (6), (7)
  for (Prime p : g.primes()) {
    PrimeInvariants pi = inv.at(p);
    auto crt = omega_crt(n, p);
    auto omega = omega_cyclic_blocks(g, p);
    if (!crt) {
      std::vector<std::string> site;
      for (std::size_t b : omega) site.push_back(g.blocks[b].name);
      return violation(ViolationKind::CrtInconsistent, site, p,
                       "cyclic scalars at p=" + prime_str(p) + " admit no common p-adic value");
    }
    if (!pi.d && !omega.empty()) {
      const Rational& a = alpha_div.at(p);
      for (std::size_t b : omega)
        if (n.cyc[b] != rational_mod(a, modulus_of(g.blocks[b])))
          return violation(ViolationKind::OmegaDivMismatch, {g.blocks[b].name, blocks_of_prime(g, p, BlockKind::Prufer).front()}, p,
                           "omega many Prufer copies force the cyclic scalar to match " + to_string(a));
    }
    PrimeCertificate pc;
    pc.alpha_cyc = *crt;
    if (alpha_div.count(p)) pc.alpha_div = alpha_div.at(p);
    if (pi.critical && pc.alpha_cyc) {
      Rational side;
      if (cert.r && std::binary_search(cert.pi.begin(), cert.pi.end(), p))
        side = 0;
      else if (pi.s_rank >= 1)
        side = *cert.r;
      else
        side = *pc.alpha_div;
      pc.bridged = mod_floor(pc.alpha_cyc->value - rational_mod(side, pc.alpha_cyc->modulus()), pc.alpha_cyc->modulus()) != 0;
    }
    cert.per_prime[p] = pc;
  }
  return cert;
}

Decomposition decompose(const Endo& phi) {
  auto v = is_inertial(phi);
  if (auto* c = std::get_if<InertialCertificate>(&v)) return decompose(phi, *c);
  throw UsageError("decompose needs an inertial endomorphism: " + std::get<Violation>(v).message);
}

Decomposition decompose(const Endo& phi, const InertialCertificate& cert) {
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  Decomposition out{Endo::zero(n.group), Endo::zero(n.group), Endo::zero(n.group), n, n, {}};
  if (g.is_finite()) {
    out.ui = n;
    return out;
  }
  if (!g.has_ftfr()) {
    out.sm = multiplication(n.group, Rational(n.free_scalar));
  } else if (!g.is_periodic()) {
    if (!cert.r || scalar_of(n.tf) != cert.r) throw UsageError("certificate does not match the endomorphism");
    out.sm = semi_multiplication(n.group, 0, cert.pi, *cert.r);
  }
  out.phi1 = sub(n, out.sm);

  if (g.has_ftfr()) {
    Invariants inv = invariants(g);
    for (const auto& [p, pi] : inv.primes) {
      if (!pi.critical) continue;
      auto crt = omega_crt(out.phi1, p);
      if (!crt || !*crt) throw UsageError("certificate does not match the endomorphism");
      Rational beta = 0;
      if (pi.s_rank == 0) beta = *div_scalar(out.phi1.div.at(p));
      Integer mod = ipow(p, pi.c);
      Integer s = mod_floor((*crt)->value - rational_mod(beta, mod), mod);
      if (s != 0) out.bridge[p] = s;
    }
  }
  out.nm = mini_multiplication(n.group, out.bridge);
  out.phi2 = sub(out.phi1, out.nm);
  out.ui = out.phi2;
  return out;
}

std::optional<std::map<Prime, Rational>> uniform_witness(const Endo& phi) {
  if (!inertial(phi)) return std::nullopt;
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  if (!n.tf.is_zero() || n.free_scalar != 0 || !n.tau.empty()) return std::nullopt;
  Invariants inv = invariants(g);
  std::map<Prime, Rational> beta;
  for (Prime p : g.primes()) {
    PrimeInvariants pi = inv.at(p);
    std::optional<Rational> b;
    if (pi.s_rank >= 1) {
      b = Rational(0);
      if (n.div.count(p) && div_scalar(n.div.at(p)) != b) return std::nullopt;
    } else if (n.div.count(p)) {
      b = div_scalar(n.div.at(p));
    } else {
      auto crt = omega_crt(n, p);
      if (crt && *crt) b = Rational((*crt)->value);
    }
    if (!b) continue;
    for (std::size_t blk : omega_cyclic_blocks(g, p))
      if (n.cyc[blk] != rational_mod(*b, modulus_of(g.blocks[blk]))) return std::nullopt;
    if (*b != 0) beta[p] = *b;
  }
  return beta;
}

HElement ui_class_in_H(const Endo& phi) {
  auto beta = uniform_witness(phi);
  if (!beta) throw UsageError("endomorphism is not uniform");
  return HElement{JElement(0, *beta), h_descriptor(phi.g())};
}

std::optional<BoundedSplit> bounded_split(const Endo& phi) {
  if (!is_bounded(phi) || !inertial(phi)) return std::nullopt;
  Endo n = normalize(phi);
  const GroupDesc& g = n.g();
  Invariants inv = invariants(g);
  std::map<Prime, Integer> per_prime;
  for (const auto& [p, pi] : inv.primes) {
    if (!pi.omega_cyclic || !pi.d) continue;
    auto crt = omega_crt(n, p);
    if (crt && *crt && (*crt)->value != 0) per_prime[p] = (*crt)->value;
  }
  Endo nm = mini_multiplication(n.group, per_prime);
  Endo fin = sub(n, nm);
  if (!is_finitary(fin)) return std::nullopt;
  return BoundedSplit{nm, fin};
}

std::optional<Rational> r_of(const Endo& phi) {
  auto v = is_inertial(phi);
  const auto* c = std::get_if<InertialCertificate>(&v);
  if (!c) throw UsageError("r is defined for inertial endomorphisms only");
  return c->r;
}

}  // namespace endoring
