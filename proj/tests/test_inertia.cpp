#include <doctest.h>

#include "endoring/corpus.hpp"
#include "endoring/inertia.hpp"
#include "helpers.hpp"

using namespace endoring;
using namespace endoring::testing;

namespace {

std::optional<ViolationKind> kind_of(const Endo& e) {
  Verdict v = is_inertial(e);
  if (auto* viol = std::get_if<Violation>(&v)) return viol->kind;
  return std::nullopt;
}

}  // namespace

TEST_CASE("is_inertial examples") {
  for (const auto& g : corpus_groups()) CHECK(inertial(Endo::identity(g)));
  CHECK(kind_of(endo_on(corpus_group("Pr2"), "div[D.0 -> D.0] = 2 div[D.1 -> D.1] = 3")) == ViolationKind::DivNotScalar);
  auto c = group_of("group A { block B1 = cyclic(p=2,k=1,mult=omega) block B2 = cyclic(p=2,k=2,mult=omega) }");
  CHECK(kind_of(endo_on(c, "cyc[B1] = 0 cyc[B2] = 1")) == ViolationKind::CrtInconsistent);
  CHECK(kind_of(endo_on(corpus_group("Z2"), "tf[C.0 -> C.0] = 1 tf[C.1 -> C.1] = 2")) == ViolationKind::TfNotScalar);
  Verdict v = is_inertial(endo_on(corpus_group("CritTF"), "cyc[B] = 1"));
  REQUIRE(std::holds_alternative<InertialCertificate>(v));
  CHECK(std::get<InertialCertificate>(v).per_prime.at(2).bridged);
}

TEST_CASE("each violation kind") {
  CHECK(kind_of(endo_on(corpus_group("Loc23"), "tf[C.0 -> C.0] = 1/2 tf[C.1 -> C.1] = 1/2")) == ViolationKind::PiHasDivisible);
  CHECK(kind_of(endo_on(corpus_group("Loc23"), "tf[C.0 -> C.0] = 1 tf[C.1 -> C.1] = 1 div[D.0 -> D.0] = 3")) ==
        ViolationKind::DivVsRMismatch);
  CHECK(kind_of(endo_on(corpus_group("Loc23"),
                        "tf[C.0 -> C.0] = 1 tf[C.1 -> C.1] = 1 div[D.0 -> D.0] = 1 tau[C.0 -> D.0] = 1")) ==
        ViolationKind::TauNonzero);
  CHECK(kind_of(endo_on(corpus_group("Pr3w"), "div[D] = 2 cyc[B] = 1")) == ViolationKind::OmegaDivMismatch);
  CHECK(kind_of(endo_on(corpus_group("NonFTFR"), "tf[F] = 1 div[D.0 -> D.0] = 1/2")) == ViolationKind::NotFtfrNotInteger);
}

TEST_CASE("invalid endo is a usage error") {
  auto g = group_of("group A { block Z = torsionfree(pi={},rank=1) }");
  Endo bad = parse(serialize(*g) + "endo e on A { tf[Z.0 -> Z.0] = 1/3 }").endos[0].endo;
  CHECK_THROWS_AS(is_inertial(bad), UsageError);
}

TEST_CASE("decompose examples") {
  auto m = group_of("group M { block B = cyclic(p=3,k=1,mult=omega) block C = torsionfree(pi={},rank=1) }");
  Endo three = multiplication(m, Rational(3));
  Decomposition d = decompose(three);
  CHECK(equal(d.sm, three));
  CHECK(equal(d.ui, Endo::zero(m)));
  CHECK(equal(d.nm, Endo::zero(m)));

  auto ct = corpus_group("CritTF");
  Endo mini = endo_on(ct, "cyc[B] = 1");
  d = decompose(mini);
  CHECK(equal(d.sm, Endo::zero(ct)));
  CHECK(equal(d.ui, Endo::zero(ct)));
  CHECK(equal(d.nm, mini));

  auto cr = corpus_group("Crit2");
  Endo gap = endo_on(cr, "cyc[B] = 3 div[D.0 -> D.0] = 1");
  d = decompose(gap);
  CHECK(equal(d.nm, endo_on(cr, "cyc[B] = 2")));
  CHECK(equal(d.ui, Endo::identity(cr)));
  CHECK(d.bridge.at(2) == 2);
}

TEST_CASE("decompose round trip on random inertial endos") {
  std::mt19937_64 rng(21);
  for (const auto& g : corpus_groups()) {
    CAPTURE(g->name);
    for (int t = 0; t < 10; ++t) {
      Endo phi = random_inertial(g, rng);
      REQUIRE(inertial(phi));
      Decomposition d = decompose(phi);
      CHECK(equal(add(add(d.sm, d.ui), d.nm), phi));
      CHECK(equal(d.phi1, sub(phi, d.sm)));
      CHECK(equal(d.phi2, sub(d.phi1, d.nm)));
      if (g->has_ftfr()) CHECK(is_uniform(d.ui));
      else CHECK(is_finitary(d.ui));
      EndoClass nm = classify(d.nm);
      CHECK((nm.mini.has_value() || equal(d.nm, Endo::zero(g))));
      EndoClass sm = classify(d.sm);
      CHECK((sm.semi.has_value() || sm.multiplication.has_value() || is_finitary(d.sm)));
      if (g->is_periodic()) CHECK(equal(d.sm, Endo::zero(g)));
    }
  }
}

TEST_CASE("is_uniform examples") {
  std::mt19937_64 rng(4);
  for (const auto& g : corpus_groups())
    if (g->has_ftfr()) CHECK(is_uniform(random_finitary(g, rng)));
  auto j = group_of("group J { block B = cyclic(p=3,k=2,mult=omega) block D = prufer(p=5,copies=1) }");
  CHECK(is_uniform(multiplication(j, JElement(2, {{3, Rational(4)}}))));
  CHECK_FALSE(is_uniform(endo_on(corpus_group("CritTF"), "cyc[B] = 1")));
}

TEST_CASE("ui_class_in_H examples") {
  std::mt19937_64 rng(6);
  auto g = group_of("group A { block B = cyclic(p=2,k=2,mult=omega) }");
  HElement zero = ui_class_in_H(random_finitary(g, rng));
  CHECK(h_equal(zero, HElement{JElement(0), h_descriptor(*g)}));
  Endo m = endo_on(g, "cyc[B] = 3");
  HElement h = ui_class_in_H(m);
  CHECK(h.descriptor == HDescriptor{{2, HBounds{2, 2}}});
  CHECK(h.value.at(2) == 3);
  CHECK(h_equal(h, ui_class_in_H(add(m, random_finitary(g, rng)))));
  CHECK_THROWS_AS(ui_class_in_H(endo_on(corpus_group("CritTF"), "cyc[B] = 1")), UsageError);
}

TEST_CASE("bounded_split examples") {
  std::mt19937_64 rng(8);
  for (const auto& g : corpus_groups()) {
    Endo f = random_finitary(g, rng);
    auto s = bounded_split(f);
    REQUIRE(s);
    CHECK(equal(s->nm, Endo::zero(g)));
    CHECK(equal(s->fin, f));
  }
  auto cr = corpus_group("Crit2");
  Endo mini = endo_on(cr, "cyc[B] = 1");
  auto s = bounded_split(mini);
  REQUIRE(s);
  CHECK(equal(s->nm, mini));
  CHECK(equal(s->fin, Endo::zero(cr)));
  CHECK_FALSE(bounded_split(Endo::identity(cr)));
}

TEST_CASE("mini-multiplications from nm_type") {
  for (const auto& g : corpus_groups()) {
    if (!g->has_ftfr()) continue;
    for (const auto& [p, c] : nm_type(*g)) {
      CAPTURE(g->name);
      Endo one = mini_multiplication(g, 1, {p});
      CHECK(inertial(one));
      CHECK(close(scale(one, ipow(p, c)), Endo::zero(g)));
      CHECK_FALSE(close(scale(one, ipow(p, c - 1)), Endo::zero(g)));
    }
  }
}

TEST_CASE("closure and commutativity mod F on random pairs") {
  std::mt19937_64 rng(30);
  for (const auto& g : corpus_groups()) {
    for (int t = 0; t < 8; ++t) {
      Endo a = random_inertial(g, rng), b = random_inertial(g, rng);
      CHECK(inertial(add(a, b)));
      CHECK(inertial(compose(a, b)));
      CHECK(is_finitary(sub(compose(a, b), compose(b, a))));
    }
  }
}
