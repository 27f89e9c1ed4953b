#include <doctest.h>

#include "endoring/corpus.hpp"
#include "endoring/oracle.hpp"
#include "helpers.hpp"

using namespace endoring;
using namespace endoring::testing;

namespace {

FGSubgroup sub(const GroupRef& g, std::vector<std::map<Coord, Rational>> gens) {
  FGSubgroup h{g, {}, "test"};
  for (const auto& raw : gens) h.generators.push_back(make_element(*g, raw));
  return h;
}

Violation violation_of(const Endo& e) { return std::get<Violation>(is_inertial(e)); }

}  // namespace

TEST_CASE("index_in_sum examples") {
  auto z = group_of("group Z { block C = torsionfree(pi={}, rank=1) }");
  Endo three = multiplication(z, Rational(3));
  CHECK(index_in_sum(sub(z, {{{Coord{0, 0}, Rational(2)}}}), three) == IndexValue(Integer(1)));

  auto z2 = corpus_group("Z2");
  Endo diag = endo_on(z2, "tf[C.0 -> C.0] = 1 tf[C.1 -> C.1] = 2");
  CHECK_FALSE(index_in_sum(sub(z2, {{{Coord{0, 0}, Rational(1)}, {Coord{0, 1}, Rational(1)}}}), diag).has_value());

  auto ct = corpus_group("CritTF");
  Endo mini = endo_on(ct, "cyc[B] = 1");
  IndexValue idx = index_in_sum(sub(ct, {{{Coord{0, 0}, Rational(1)}, {Coord{1, 0}, make_rational(1, 2)}}}), mini);
  REQUIRE(idx.has_value());
  CHECK(Integer(2) % *idx == 0);
}

TEST_CASE("multiplications leave every sampled subgroup inert with index 1") {
  for (const char* name : {"Z2w", "C3mix", "Pr2", "Mixed3", "Loc23"}) {
    auto g = corpus_group(name);
    CAPTURE(name);
    Endo m = g->is_periodic() ? multiplication(g, JElement(Integer(2))) : multiplication(g, Rational(1));
    for (const auto& h : sample_subgroups(g, 20, 5)) CHECK(index_in_sum(h, m) == IndexValue(Integer(1)));
  }
}

TEST_CASE("naive_index agrees with the Smith form index on truncations") {
  std::mt19937_64 rng(3);
  for (const char* name : {"Z2w", "C3mix", "Crit2", "PF3", "Fin2"}) {
    auto g = corpus_group(name);
    CAPTURE(name);
    for (int t = 0; t < 3; ++t) {
      Endo phi = random_finitary(g, rng);
      TruncatedEndo te = truncate_endo(phi, 2);
      if (finite_order(*te.group) > 4096) continue;
      for (const auto& h : sample_subgroups(te.group, 10, 9 + t)) {
        IndexValue smith = index_in_sum(h, te.phi);
        REQUIRE(smith.has_value());
        CHECK(naive_index(h, te.phi) == *smith);
      }
    }
  }
}

TEST_CASE("sampling is deterministic") {
  auto g = corpus_group("Loc23");
  auto a = sample_subgroups(g, 30, 77);
  auto b = sample_subgroups(g, 30, 77);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].family == b[i].family);
    CHECK(a[i].generators == b[i].generators);
  }
}

TEST_CASE("enumerate_all_subgroups counts") {
  auto v = group_of("group V { block B = cyclic(p=2, k=1, mult=3) }");
  CHECK(enumerate_all_subgroups(v).size() == 16);
  auto c = group_of("group C { block B = cyclic(p=2, k=3, mult=1) }");
  CHECK(enumerate_all_subgroups(c).size() == 4);
  CHECK_THROWS_AS(enumerate_all_subgroups(v, 3), UsageError);
}

TEST_CASE("inertness_profile") {
  std::vector<unsigned> levels{2, 4, 6};
  auto c3 = corpus_group("C3mix");
  InertnessEvidence ok = inertness_profile(Endo::identity(c3), levels, 30, 1);
  CHECK(ok.hint == Hint::Stable);
  for (const auto& r : ok.per_level) CHECK(r.max_index == IndexValue(Integer(1)));

  InertnessEvidence bad = inertness_profile(endo_on(c3, "cyc[B1] = 0 cyc[B2] = 1"), levels, 30, 1);
  CHECK(bad.hint == Hint::Growing);

  InertnessEvidence mini = inertness_profile(endo_on(corpus_group("Crit2"), "cyc[B] = 1"), levels, 30, 1);
  CHECK(mini.hint == Hint::Stable);
}

TEST_CASE("fs_profile") {
  std::vector<unsigned> levels{2, 4, 6};
  auto c3 = corpus_group("C3mix");
  FsReport id = fs_profile(Endo::identity(c3), levels, 20, 1);
  for (const auto& [lvl, m] : id.per_level) CHECK(m == 1);
  CHECK(id.hint == Hint::Stable);
  CHECK(fs_profile(endo_on(c3, "cyc[B1] = 1 cyc[B2] = 4 fin[B1.0] = {B2.0: 3}"), levels, 20, 1).hint == Hint::Stable);
  CHECK(fs_profile(endo_on(c3, "cyc[B1] = 0 cyc[B2] = 1"), levels, 20, 1).hint == Hint::Growing);
  CHECK_THROWS_AS(fs_profile(Endo::identity(corpus_group("Z2")), levels, 20, 1), UsageError);
}

TEST_CASE("witness_search") {
  Endo diag = endo_on(corpus_group("Z2"), "tf[C.0 -> C.0] = 1 tf[C.1 -> C.1] = 2");
  auto w = witness_search(diag, violation_of(diag));
  REQUIRE(w.has_value());
  CHECK(w->unbounded);
  bool infinite = false;
  for (const auto& [n, idx] : w->indices) infinite = infinite || !idx.has_value();
  CHECK(infinite);

  Endo tau = endo_on(corpus_group("Loc23"), "tf[C.0 -> C.0] = 1 tf[C.1 -> C.1] = 1 div[D.0 -> D.0] = 1 tau[C.0 -> D.0] = 1");
  auto wt = witness_search(tau, violation_of(tau));
  REQUIRE(wt.has_value());
  CHECK(wt->unbounded);

  Endo pr = endo_on(corpus_group("Pr2"), "div[D.0 -> D.0] = 1 div[D.1 -> D.1] = 2");
  auto wp = witness_search(pr, violation_of(pr));
  REQUIRE(wp.has_value());
  CHECK(wp->unbounded);
}
