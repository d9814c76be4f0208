#include <cmath>
#include <sstream>

#include "dnlskam/kam.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace dnlskam;

namespace {
const cplx I(0.0, 1.0);

real rel(real a, real b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-4000L); }

KamConfig small_cfg(double r) {
  KamConfig cfg;
  cfg.dnls.mode_cutoff = 4;
  cfg.fourier_max = 12;
  cfg.per_axis = 2;
  cfg.r = r;
  cfg.globals.alpha0 = 1e-3 * std::pow(r, 1.5) / std::sqrt(2.0);
  cfg.enforce_contraction = false;
  cfg.eps_floor = 0;
  return cfg;
}

bool subset(const std::vector<char>& a, const std::vector<char>& b) {
  for (size_t p = 0; p < a.size(); ++p)
    if (a[p] && !b[p]) return false;
  return true;
}

}  // namespace

TEST_CASE("schedule constants") {
  KamGlobals g;
  g.beta = 1.0 / 13.0;
  CHECK(std::abs(g.beta_prime() - 1.0 / 28.0) < 1e-16);
  CHECK(std::abs(g.kappa() - 37.0 / 28.0) < 1e-15);
  CHECK(std::abs(g.kappa() - 111.0 / 84.0) < 1e-15);
  g.beta = 1.0;  // min{1/2, 1/4}
  CHECK(g.beta_prime() == 0.125);
  g = KamGlobals{};
  CHECK(g.C00() == 16.0);
  CHECK(std::abs(g.gamma0_value() - g.beta_prime() / (800.0 * 16.0)) < 1e-20);
  g.gamma0 = 1e-3;
  CHECK(g.gamma0_value() == 1e-3);
  CHECK(g.B_exponent() == 33.0);
}

TEST_CASE("schedule rows") {
  KamGlobals g;
  auto row = schedule(2, g, 1e-40L, 1e-6L);
  CHECK(std::abs(row.s - 0.1) < 1e-16);
  CHECK(std::abs(row.sigma - 0.005) < 1e-17);
  CHECK(std::abs(row.a - 0.0025) < 1e-17);

  for (int nu : {0, 1, 3, 6})
    for (real eps : {1e-3L, 1e-40L, 1e-700L}) {
      auto w = schedule(nu, g, eps, 1e-20L);
      const real h = std::pow(2.0L, -nu);
      CHECK(rel(w.eps_next / std::pow(eps, static_cast<real>(g.kappa())), std::cbrt(w.B / w.alpha2)) < 1e-15L);
      CHECK(rel(std::pow(2 * w.eta, 3), std::pow(eps, 1 - static_cast<real>(g.beta_prime())) * w.B / w.alpha2) < 1e-15L);
      CHECK(rel(w.r_next, w.eta * w.r) < 1e-18L);
      CHECK(rel(w.K, 5 * std::fabs(std::log(eps)) / (4 * w.sigma)) < 1e-15L);
      CHECK(rel(w.Pi, 5 * std::fabs(std::log(eps)) / (2 * w.a)) < 1e-15L);
      CHECK(rel(w.alpha1, g.alpha0 * (9 + h) / 10) < 1e-15L);
      CHECK(rel(w.alpha2, g.alpha0 * h / w.Pi) < 1e-15L);
      CHECK(rel(w.B, g.c * std::pow(static_cast<real>(w.sigma), -33.0L)) < 1e-15L);
      CHECK(std::abs(w.m - g.m0 * (9 + static_cast<double>(h)) / 10) < 1e-15);
      CHECK(std::abs(w.E - g.E0 * (10 - static_cast<double>(h)) / 9) < 1e-15);
      CHECK(std::abs(w.M - w.M1 - w.M2) < 1e-15);
      CHECK(rel(w.lambda, (nu == 0 ? static_cast<real>(g.alpha0) : w.alpha2) / w.M) < 1e-15L);
      if (nu == 0) CHECK(w.J == 0);
      if (nu == 1) CHECK(rel(w.J, std::pow(static_cast<real>(g.gamma0_value()), -1 / (g.tau + 1))) < 1e-15L);
    }

  g.c = 1e-200;
  auto tab = schedule_table(g, 1e-30L, 1e-8L, 4);
  REQUIRE(tab.size() == 4);
  for (int nu = 0; nu + 1 < 4; ++nu) {
    CHECK(tab[nu + 1].eps == tab[nu].eps_next);
    CHECK(tab[nu + 1].r == tab[nu].r_next);
    CHECK(tab[nu + 1].nu == nu + 1);
  }
}

TEST_CASE("schedule and config errors") {
  KamGlobals g;
  CHECK_THROWS_AS(schedule(0, g, 1.0L, 1e-6L), std::domain_error);
  CHECK_THROWS_AS(schedule(0, g, 0.0L, 1e-6L), std::domain_error);
  CHECK_THROWS_AS(schedule(0, g, -1e-3L, 1e-6L), std::domain_error);
  g.tau = 4;
  CHECK_THROWS(g.validate());
  g = KamGlobals{};
  g.gamma0 = 0.5;
  CHECK_THROWS(g.validate());

  KamConfig cfg;
  cfg.validate();
  CHECK(cfg.dnls_resolved().N == 2);
  cfg.q = 1.5;
  CHECK_THROWS(cfg.validate());
  cfg = KamConfig{};
  cfg.J = {-1, 2, 4};
  CHECK_THROWS(cfg.validate());
  cfg = KamConfig{};
  cfg.r = 2.0;
  CHECK_THROWS(cfg.validate());
  cfg = KamConfig{};
  cfg.J = {-1, 1};
  cfg.dnls.mode_cutoff = 4;
  CHECK_THROWS_AS(initial_state(cfg), IndexError);
}

TEST_CASE("P = 0 is a fixed point") {
  auto init = initial_state(small_cfg(1e-12));
  KamState st = init.state;
  const auto freq0 = st.freq;
  const auto active0 = st.active;
  for (auto& P : st.P) P = FormalSeries(st.sites, st.budget);
  st.eps = 0;
  auto rep = kam_step(st, small_cfg(1e-12));
  CHECK(rep.eps_next_measured == 0);
  CHECK(rep.F_terms == 0);
  CHECK(rep.excluded_added == 0);
  CHECK(st.active == active0);
  for (size_t p = 0; p < st.P.size(); ++p) {
    CHECK(st.P[p].empty());
    CHECK(st.generators[p].size() == 1);
    CHECK(st.generators[p][0].empty());
    CHECK(st.freq[p].om_small == freq0[p].om_small);
    CHECK(st.freq[p].Om_small == freq0[p].Om_small);
  }
  CHECK(verify_contraction({rep}, KamGlobals{}).ok);
}

TEST_CASE("diagonal k = 0 perturbation is absorbed into N") {
  auto cfg = small_cfg(1e-12);
  auto init = initial_state(cfg);
  KamState st = init.state;
  const SiteSet& S = *st.sites;
  const auto freq0 = st.freq;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1e-14, 1e-14);
  std::vector<std::vector<double>> cy(st.P.size()), cz(st.P.size());
  for (size_t p = 0; p < st.P.size(); ++p) {
    std::vector<FormalSeries::Term> v;
    for (int b = 0; b < S.n(); ++b) {
      std::vector<int> i(S.n(), 0);
      i[b] = 1;
      cy[p].push_back(U(rng));
      v.emplace_back(make_key(S, {}, i, {}, {}), cy[p].back());
    }
    for (int m = 0; m < S.mode_count(); ++m) {
      cz[p].push_back(U(rng));
      v.emplace_back(make_key(S, {}, {}, {{S.mode(m), 1}}, {{S.mode(m), 1}}), cz[p].back());
    }
    st.P[p] = FormalSeries::from_terms(st.sites, st.budget, std::move(v));
  }
  st.eps = measure_eps(st, cfg, cfg.globals.s0, st.r, cfg.globals.s0 / 20 / cfg.globals.C_J, 0.0L);
  REQUIRE(st.eps > 0);
  auto rep = kam_step(st, cfg);
  CHECK(rep.F_terms == 0);
  CHECK(rep.floor_events == 0);
  for (size_t p = 0; p < st.P.size(); ++p) {
    if (!st.active[p]) continue;
    CHECK(st.P[p].empty());
    for (int b = 0; b < S.n(); ++b)
      CHECK(std::abs(st.freq[p].om_small[b] - freq0[p].om_small[b] - sign(S.site(b)) * cy[p][b]) <=
            1e-30 + 1e-15 * std::abs(freq0[p].om_small[b]));
    for (int m = 0; m < S.mode_count(); ++m)
      CHECK(std::abs(st.freq[p].Om_small[m] - freq0[p].Om_small[m] - sign(S.mode(m)) * cz[p][m]) <=
            1e-30 + 1e-15 * std::abs(freq0[p].Om_small[m]));
  }
  CHECK(rep.eps_next_measured == 0);
}

TEST_CASE("KAM step invariants on the DNLS pipeline") {
  auto cfg = small_cfg(1e-20);
  cfg.globals.c = 1e-80;
  auto init = initial_state(cfg);
  KamState st = init.state;
  const SiteSet& S = *st.sites;
  REQUIRE(st.eps > 0);
  std::vector<char> prev = st.active;
  std::vector<KamStepReport> reps;
  for (int t = 0; t < 2; ++t) {
    auto rep = kam_step(st, cfg);
    reps.push_back(rep);
    CHECK(subset(st.active, prev));
    prev = st.active;
    CHECK(rep.momentum_ok);
    CHECK(rep.imag_drift <= 1e-12 * static_cast<double>(rep.eps_measured));
    for (size_t p = 0; p < st.P.size(); ++p) {
      if (!st.active[p]) continue;
      const auto& F = st.generators[p].back();
      CHECK(check_momentum_conservation(F));
      CHECK(check_momentum_conservation(st.P[p]));
      bool ok = true;
      for (auto& [k, c] : F.terms()) ok = ok && k.degree() <= 2 && !in_normal_part(k);
      CHECK(ok);  // [[F]] = 0
    }
  }
  REQUIRE(reps.size() == 2);
  CHECK(reps[1].eps_measured == reps[0].eps_next_measured);
  CHECK(reps[0].eps_next_measured < reps[0].eps_measured);

  // Phi = X_{F1} o X_{F2} preserves brackets of the coordinate functions
  size_t p = 0;
  while (!st.active[p]) ++p;
  auto img = compose_embedding(st.generators[p], st.sites, st.budget, 0);
  std::vector<FormalSeries> coords = compose_embedding({}, st.sites, st.budget, 0);
  REQUIRE(img.size() == static_cast<size_t>(2 * S.n() + 2 * S.mode_count()));
  auto image_of = [&](const FormalSeries& f) {
    // f is a combination of coordinate functions and constants
    FormalSeries out(st.sites, st.budget);
    for (auto& [k, c] : f.terms()) {
      bool found = false;
      for (size_t t = 0; t < coords.size() && !found; ++t)
        if (coords[t].terms()[0].first == k) {
          out = out + c * img[t];
          found = true;
        }
      if (!found) out = out + FormalSeries::from_terms(st.sites, st.budget, {{k, c}});
    }
    return out;
  };
  long double worst = 0, scale = 0;
  for (size_t a = 0; a < img.size(); ++a)
    for (size_t c = a; c < img.size(); ++c) {
      auto lhs = poisson_bracket(img[a], img[c], st.budget);
      auto rhs = image_of(poisson_bracket(coords[a], coords[c], st.budget));
      worst = std::max(worst, max_abs_diff(lhs, rhs));
      scale = std::max(scale, max_abs_coeff(rhs));
    }
  CHECK(worst <= 1e-12L * std::max(scale, 1.0L));
  // the map is not the identity
  long double moved = 0;
  for (size_t t = 0; t < img.size(); ++t) moved = std::max(moved, max_abs_diff(img[t], coords[t]));
  CHECK(moved > 0);
}

TEST_CASE("verify_contraction examples") {
  KamGlobals g;
  g.c = 1e-60;
  KamStepReport zero;
  zero.row = schedule(0, g, 0.5L, 1e-6L);
  CHECK(verify_contraction({zero}, g).ok);
  CHECK_FALSE(verify_contraction({}, g).ok);

  KamStepReport r;
  r.row = schedule(0, g, 1e-10L, 1e-6L);
  r.eps_measured = 1e-10L;
  r.eps_next_schedule = r.row.eps_next;
  r.drift_bound = r.row.B * r.eps_measured;
  r.eps_next_measured = 1e-10L;  // eps_1 = eps_0
  auto v = verify_contraction({r}, g);
  CHECK_FALSE(v.ok);
  CHECK_FALSE(v.diagnostics.empty());

  r.eps_next_measured = r.eps_next_schedule / 2;
  r.drift_omega = r.drift_bound / 2;
  v = verify_contraction({r}, g);
  CHECK(v.ok);
  CHECK(v.c_min <= g.c);
  CHECK(v.c_min > 0);
  // with c = c_min every inequality is tight or better
  KamGlobals g2 = g;
  g2.c = v.c_min * (1 + 1e-12);
  auto row2 = schedule(0, g2, r.eps_measured, 1e-6L);
  CHECK(r.eps_next_measured <= row2.eps_next);
  CHECK(r.drift_omega <= row2.B * r.eps_measured);

  r.drift_Omega = 2 * r.drift_bound;
  CHECK_FALSE(verify_contraction({r}, g).ok);
}

TEST_CASE("run: trivial embedding, determinism, failure modes") {
  auto cfg = small_cfg(1e-12);
  cfg.max_steps = 0;
  auto res = run(cfg);
  CHECK(res.reports.empty());
  CHECK(res.status == "max_steps");
  auto coords = compose_embedding({}, std::make_shared<const SiteSet>(cfg.J, cfg.dnls.mode_cutoff),
                                  TruncationBudget{cfg.degree_max, cfg.fourier_max, cfg.dnls.mode_cutoff}, 0);
  REQUIRE(!res.torus.embedding.empty());
  for (auto& emb : res.torus.embedding) {
    REQUIRE(emb.size() == coords.size());
    for (size_t t = 0; t < emb.size(); ++t) CHECK(max_abs_diff(emb[t], coords[t]) == 0);
  }
  for (char m : res.torus.mask) CHECK(m == 1);

  cfg = small_cfg(1e-20);
  cfg.globals.c = 1e-80;
  cfg.max_steps = 2;
  std::ostringstream a, b;
  run(cfg, &a);
  run(cfg, &b);
  CHECK(!a.str().empty());
  CHECK(a.str() == b.str());

  // tiny c makes the schedule unreachable
  cfg.globals.c = 1e-240;
  cfg.enforce_contraction = true;
  bool thrown = false;
  try {
    run(cfg);
  } catch (const ContractionFailure& e) {
    thrown = true;
    CHECK(!e.reports.empty());
  }
  CHECK(thrown);

  // alpha0 far above the parameter scale removes every grid point
  cfg = small_cfg(1e-6);
  cfg.globals.alpha0 = 1e-2;
  cfg.max_steps = 1;
  CHECK_THROWS_AS(run(cfg), AllExcluded);

  cfg = small_cfg(1e-12);
  cfg.halt_on_horizon = true;
  cfg.max_steps = 3;
  auto h = run(cfg);
  CHECK(h.status == "horizon");
  CHECK(h.reports.empty());
}
