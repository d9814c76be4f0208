#include <cmath>

#include "dnlskam/norms.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace dnlskam;
using testing_util::random_series;

namespace {
SitePtr sites12() { return std::make_shared<const SiteSet>(std::vector<int>{-1, 2}, 8); }

VectorField random_field(const SitePtr& sp, TruncationBudget b, std::mt19937_64& rng) {
  VectorField X = VectorField::zero(sp, b);
  for (auto* fam : {&X.x, &X.y, &X.z, &X.zbar})
    for (auto& c : *fam) c = random_series(sp, b, 3, 0, 3, 3, rng);
  return X;
}
}  // namespace

TEST_CASE("weighted phase norm normalizations") {
  auto sp = sites12();
  NormWeights w{0.3, 0.4, 2.0, 1.0, 0.05, 0.0};
  auto v = PhasePoint::zero(*sp);
  CHECK(weighted_phase_norm(v, *sp, w) == 0);
  v.x[0] = w.s;
  CHECK(std::abs(static_cast<double>(weighted_phase_norm(v, *sp, w)) - 1.0) < 1e-15);
  v = PhasePoint::zero(*sp);
  int j = -5;
  v.z[sp->mode_id(j)] = w.r * std::exp(-w.a_exp * 5) * std::pow(5.0, -w.p);
  CHECK(std::abs(static_cast<double>(weighted_phase_norm(v, *sp, w)) - 1.0) < 1e-15);
}

TEST_CASE("majorant norm examples") {
  auto sp = sites12();
  TruncationBudget b{4, 24, 8};
  NormWeights w{0.3, 0.4, 2.0, 1.0, 0.0, 0.02};
  CHECK(majorant_norm(VectorField::zero(sp, b), w) == 0);
  VectorField X = VectorField::zero(sp, b);
  cplx c(0.3, -0.4);
  X.x[1] = FormalSeries::from_terms(sp, b, {{make_key(*sp, {2, 1}, {}, {}, {}), c}});
  double expect = std::abs(c) * std::exp(3 * w.s) / w.s;
  CHECK(std::abs(static_cast<double>(majorant_norm(X, w)) / expect - 1.0) < 1e-14);
}

TEST_CASE("property: majorant bounds the sampled sup; subadditive and homogeneous") {
  auto sp = sites12();
  TruncationBudget b{4, 24, 8};
  NormWeights w{0.3, 0.25, 2.0, 1.0, 0.01, 0.02};
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    auto X = random_field(sp, b, rng), Y = random_field(sp, b, rng);
    real mx = majorant_norm(X, w), my = majorant_norm(Y, w);
    CHECK(sampled_sup_norm(X, w, 200, 100 + t) <= mx);
    VectorField S = X - scale(Y, -1.0);
    CHECK(majorant_norm(S, w) <= (mx + my) * (1 + 1e-14));
    real m3 = majorant_norm(scale(X, cplx(0, -3)), w);
    CHECK(std::abs(static_cast<double>(m3 / (3 * mx)) - 1.0) < 1e-13);
  }
}

TEST_CASE("hamiltonian majorant matches the materialized field") {
  auto sp = sites12();
  TruncationBudget b{6, 24, 8};
  NormWeights w{0.35, 0.3, 2.0, 1.0, 0.02, 0.03};
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    auto H = random_series(sp, b, 30, 1, 6, 4, rng);
    real a = majorant_norm_hamiltonian(H, w);
    real c = majorant_norm(hamiltonian_vector_field(H), w);
    CHECK(std::abs(static_cast<double>(a / c) - 1.0) < 1e-13);
  }
}

TEST_CASE("Lipschitz seminorm examples") {
  auto sp = sites12();
  TruncationBudget b{4, 24, 8};
  NormWeights w{0.3, 0.25, 2.0, 1.0, 0.0, 0.0};
  std::mt19937_64 rng(4);
  auto grid = ParameterGrid::box({0.0, 0.0}, {1.0, 0.5}, {2, 1});
  REQUIRE(grid.pairs.size() == 1);
  auto X0 = random_field(sp, b, rng), S = random_field(sp, b, rng);
  CHECK(lipschitz_seminorm({X0, X0}, grid, w) == 0);
  std::vector<VectorField> lin;
  for (auto& p : grid.points) lin.push_back(X0 - scale(S, -p[0]));
  real L = lipschitz_seminorm(lin, grid, w), mS = majorant_norm(S, w);
  CHECK(std::abs(static_cast<double>(L / mS) - 1.0) < 1e-12);
  auto g3 = ParameterGrid::box({0.1, 0.1}, {0.4, 0.3}, {3, 3});
  std::vector<VectorField> rnd, scaled;
  for (size_t t = 0; t < g3.size(); ++t) {
    rnd.push_back(random_field(sp, b, rng));
    scaled.push_back(scale(rnd.back(), 2.5));
  }
  real l1 = lipschitz_seminorm(rnd, g3, w);
  CHECK(l1 >= 0);
  CHECK(std::abs(static_cast<double>(lipschitz_seminorm(scaled, g3, w) / l1) - 2.5) < 1e-12);
  ParameterGrid lone = ParameterGrid::box({0.0}, {1.0}, {1});
  CHECK_THROWS(lipschitz_seminorm({X0}, lone, w));
}

TEST_CASE("parameter grid geometry") {
  auto g = ParameterGrid::box({0.0, 1.0}, {2.0, 2.0}, {4, 2});
  CHECK(g.size() == 8);
  CHECK(g.pairs.size() == 3 * 2 + 4 * 1);
  CHECK(std::abs(g.cell_volume() - 0.25) < 1e-15);
  CHECK(std::abs(g.box_volume() - 2.0) < 1e-15);
  for (auto [a, c] : g.pairs) CHECK(std::abs(distance(g.points[a], g.points[c]) - 0.5) < 1e-15);
}
