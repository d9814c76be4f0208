#include <random>

#include "dnlskam/index.hpp"
#include "doctest.h"

using namespace dnlskam;

TEST_CASE("sign") {
  CHECK(sign(3) == 1);
  CHECK(sign(-7) == -1);
  CHECK_THROWS_AS(sign(0), IndexError);
}

TEST_CASE("momentum_scalar examples") {
  CHECK(momentum_scalar({0, 0}, {{5, 1}}, {{5, 1}}, {-1, 2}) == 0);
  CHECK(momentum_scalar({1, 1}, {{3, 1}}, {{4, 1}}, {-1, 2}) == 0);
  CHECK(momentum_scalar({2, 0}, {}, {{-3, 1}}, {-1, 2}) == 1);
}

TEST_CASE("momentum_vf examples") {
  MultiIndex m{{0, 0}, {0, 0}, {}, {}};
  CHECK(momentum_vf(m, {ComponentLabel::z, 3}, {-1, 2}) == -3);
  CHECK(momentum_vf(m, {ComponentLabel::zbar, 3}, {-1, 2}) == 3);
  MultiIndex m2{{1, 0}, {0, 0}, {}, {}};
  CHECK(momentum_vf(m2, {ComponentLabel::y, 0}, {-1, 2}) == -1);
}

TEST_CASE("admissible examples") {
  CHECK(admissible({-1, 1}) == Verdict::violates_divisibility);
  CHECK(admissible({-1, 2}) == Verdict::admissible);
  CHECK(admissible({1, 2}) == Verdict::violates_sign_condition);
  CHECK(admissible({-2, 1, 3}) == Verdict::admissible);
  CHECK_THROWS_AS(admissible({3}), IndexError);
  CHECK_THROWS_AS(admissible({2, 2}), IndexError);
  CHECK_THROWS_AS(admissible({0, 2}), IndexError);
}

TEST_CASE("SiteSet invariants") {
  SiteSet s({-1, 2}, 8);
  CHECK(s.c_J() == 2);
  CHECK(s.mode_count() == 14);
  CHECK(s.mode_id(0) == -1);
  CHECK(s.mode_id(-1) == -1);
  CHECK(s.mode_id(2) == -1);
  CHECK(s.mode_id(9) == -1);
  for (int id = 0; id < s.mode_count(); ++id) CHECK(s.mode_id(s.mode(id)) == id);
  CHECK_THROWS_AS(SiteSet({2, -1}, 8), IndexError);
  CHECK_THROWS_AS(SiteSet({0, 1}, 8), IndexError);
}

TEST_CASE("property: momentum additivity and vf consistency") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> K(-6, 6), J(-8, 8), P(0, 2);
  const std::vector<int> sites{-1, 2};
  auto rnd = [&] {
    MultiIndex m;
    m.k = {K(rng), K(rng)};
    m.i = {0, 0};
    for (int t = 0; t < 3; ++t) {
      int j = J(rng);
      if (j == 0) continue;
      m.alpha[j] += P(rng);
      int q = J(rng);
      if (q != 0) m.beta[q] += P(rng);
    }
    return m;
  };
  for (int t = 0; t < 500; ++t) {
    MultiIndex a = rnd(), b = rnd(), c;
    c.k = {a.k[0] + b.k[0], a.k[1] + b.k[1]};
    c.alpha = a.alpha;
    c.beta = a.beta;
    for (auto& [j, p] : b.alpha) c.alpha[j] += p;
    for (auto& [j, p] : b.beta) c.beta[j] += p;
    CHECK(momentum_scalar(c, sites) == momentum_scalar(a, sites) + momentum_scalar(b, sites));
    int j = J(rng);
    if (j == 0) j = 3;
    CHECK(momentum_vf(a, {ComponentLabel::z, j}, sites) + j == momentum_scalar(a, sites));
    CHECK(momentum_vf(a, {ComponentLabel::zbar, j}, sites) - j == momentum_scalar(a, sites));
  }
}
