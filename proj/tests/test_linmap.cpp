#include <doctest.h>

#include <random>

#include "endoring/linmap.hpp"

using namespace endoring;

namespace {

ExactMatrix mat(Prime p, std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<Row> r;
  for (const auto& row : rows) {
    Row x;
    for (long v : row) x.push_back(Rational(v));
    r.push_back(std::move(x));
  }
  return ExactMatrix(Field{p}, std::move(r));
}

ExactMatrix random_matrix(Field f, std::size_t n, std::mt19937_64& rng) {
  std::vector<Row> r(n, Row(n));
  for (auto& row : r)
    for (auto& x : row) x = Rational(f.is_rational() ? static_cast<long>(rng() % 7) - 3 : static_cast<long>(rng() % f.p));
  return ExactMatrix(f, std::move(r));
}

}  // namespace

TEST_CASE("scalar_defect examples") {
  DefectResult s = scalar_defect(ExactMatrix::scalar(Field{0}, 3, Rational(7)));
  CHECK(s.lambda == Rational(7));
  CHECK(s.defect == 0);
  CHECK(rank(s.finitary_part) == 0);

  DefectResult j = scalar_defect(mat(2, {{1, 1}, {0, 1}}));
  CHECK(j.lambda == Rational(1));
  CHECK(j.defect == 1);
  CHECK(j.finitary_part == mat(2, {{0, 1}, {0, 0}}));

  DefectResult d = scalar_defect(mat(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}), true);
  CHECK(d.lambda == Rational(1));
  CHECK(d.defect == 1);

  DefectResult rot = scalar_defect(mat(0, {{0, -1}, {1, 0}}), true);
  CHECK_FALSE(rot.lambda);
  CHECK(rot.defect == 2);
}

TEST_CASE("rational eigenvalues") {
  CHECK(rational_eigenvalues(mat(0, {{2, 0}, {0, -3}})) == std::vector<Rational>{-3, 2});
  std::vector<Row> r{{make_rational(1, 2), 0}, {1, make_rational(1, 2)}};
  CHECK(rational_eigenvalues(ExactMatrix(Field{0}, r)) == std::vector<Rational>{make_rational(1, 2)});
  CHECK(rational_eigenvalues(mat(0, {{0, -1}, {1, 0}})).empty());
}

TEST_CASE("max_inert_codim examples") {
  CHECK(max_inert_codim(ExactMatrix::scalar(Field{2}, 3, Rational(1))) == 0);
  CHECK(max_inert_codim(mat(2, {{1, 1}, {0, 1}})) == 1);
  CHECK(max_inert_codim(mat(2, {{0, 1}, {0, 0}})) == 1);
  CHECK_THROWS_AS(max_inert_codim(ExactMatrix::scalar(Field{2}, 8, Rational(0)), 100), UsageError);
}

TEST_CASE("subspace counts") {
  CHECK(subspace_count(2, 3) == 16);
  CHECK(subspace_count(3, 2) == 6);
  std::size_t seen = 0;
  enumerate_subspaces(2, 3, [&](const std::vector<Row>&) { ++seen; });
  CHECK(seen == 16);
}

TEST_CASE("growth never exceeds the defect") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    Field f{t % 3 == 0 ? Prime(0) : (t % 3 == 1 ? Prime(2) : Prime(5))};
    ExactMatrix m = random_matrix(f, 2 + rng() % 9, rng);
    GrowthReport g = growth_bound_check(m, 60, rng());
    CHECK(g.violations == 0);
    CHECK(g.max_observed <= g.defect);
  }
  CHECK(growth_bound_check(ExactMatrix::scalar(Field{0}, 5, Rational(4)), 50, 1).max_observed == 0);
}

TEST_CASE("growth bounded by every rank(M - lambda I) on exhaustive enumeration") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 30; ++t) {
    ExactMatrix m = random_matrix(Field{2}, 1 + rng() % 4, rng);
    std::size_t defect = scalar_defect(m).defect;
    enumerate_subspaces(2, m.size(), [&](const std::vector<Row>& h) { CHECK(growth(m, h) <= defect); });
  }
}

TEST_CASE("shift equivariance and exactness") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    Field f{t % 2 ? Prime(3) : Prime(0)};
    ExactMatrix m = random_matrix(f, 1 + rng() % 5, rng);
    Rational mu = f.is_rational() ? make_rational(Integer(static_cast<long>(rng() % 7) - 3), 2) : Rational(1);
    DefectResult a = scalar_defect(m);
    DefectResult b = scalar_defect(m + ExactMatrix::scalar(f, m.size(), mu));
    CHECK(a.defect == b.defect);
    if (f.is_rational() && a.defect < m.size()) CHECK(*b.lambda == *a.lambda + mu);
    CHECK(ExactMatrix::scalar(f, m.size(), *a.lambda) + a.finitary_part == m);
    CHECK(rank(a.finitary_part) == a.defect);
  }
}

TEST_CASE("scalar plus low rank has small defect") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 10, k = 2;
    std::vector<Row> u(n, Row(k)), v(k, Row(n));
    for (auto& r : u)
      for (auto& x : r) x = Rational(static_cast<long>(rng() % 5) - 2);
    for (auto& r : v)
      for (auto& x : r) x = Rational(static_cast<long>(rng() % 5) - 2);
    std::vector<Row> m(n, Row(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational s = i == j ? Rational(3) : Rational(0);
        for (std::size_t l = 0; l < k; ++l) s += u[i][l] * v[l][j];
        m[i][j] = s;
      }
    ExactMatrix mm(Field{0}, m);
    CHECK(scalar_defect(mm).defect <= k);
    GrowthReport g = growth_bound_check(mm, 40, t);
    CHECK(g.max_observed <= k);
  }
}
