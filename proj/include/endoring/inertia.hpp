#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "endoring/endokit.hpp"

namespace endoring {

struct PrimeCertificate {
  std::optional<Residue> alpha_cyc;  // CRT value over omega cyclic blocks
  std::optional<Rational> alpha_div;  // scalar on the Prufer blocks
  bool bridged = false;  // cyclic and divisible sides differ; absorbed by a mini-multiplication
};

struct InertialCertificate {
  std::optional<Rational> r;  // action on A/T(A); absent for periodic A
  std::vector<Prime> pi;      // primes of the denominator of r
  std::map<Prime, PrimeCertificate> per_prime;
  std::vector<std::string> exempt_blocks;  // finite blocks
};

enum class ViolationKind {
  TfNotScalar,
  PiHasDivisible,
  DivNotScalar,
  CrtInconsistent,
  DivVsRMismatch,
  TauNonzero,
  OmegaDivMismatch,
  NotFtfrNotInteger,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::vector<std::string> site;  // block names involved
  std::optional<Prime> prime;
  std::string hint;     // witness family name
  std::string message;
};

using Verdict = std::variant<InertialCertificate, Violation>;

/// Decides inertiality. Throws UsageError for an invalid endomorphism.
Verdict is_inertial(const Endo& phi);
inline bool inertial(const Endo& phi) { return std::holds_alternative<InertialCertificate>(is_inertial(phi)); }

struct Decomposition {
  Endo sm;
  Endo ui;
  Endo nm;
  Endo phi1;  // phi - sm
  Endo phi2;  // phi1 - nm
  std::map<Prime, Integer> bridge;  // s_p of the mini-multiplication
};

Decomposition decompose(const Endo& phi, const InertialCertificate& cert);
Decomposition decompose(const Endo& phi);

/// Per-prime beta_p of a uniform endomorphism; nullopt if not uniform.
std::optional<std::map<Prime, Rational>> uniform_witness(const Endo& phi);
inline bool is_uniform(const Endo& phi) { return uniform_witness(phi).has_value(); }
/// Class of a uniform endomorphism in H(A). Throws UsageError if not uniform.
HElement ui_class_in_H(const Endo& phi);

struct BoundedSplit {
  Endo nm;
  Endo fin;
};
std::optional<BoundedSplit> bounded_split(const Endo& phi);

/// Image of an inertial endomorphism in Q^{pi_*}; nullopt for periodic A.
std::optional<Rational> r_of(const Endo& phi);

}  // namespace endoring
