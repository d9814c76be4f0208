#pragma once

#include <random>

#include "dnlskam/series.hpp"

namespace testing_util {

using namespace dnlskam;

// random series with terms of weighted degree in [dmin, dmax]; zero_momentum
// keeps only momentum-free monomials
inline FormalSeries random_series(const SitePtr& sp, TruncationBudget budget, int terms, int dmin,
                                  int dmax, int kmax, std::mt19937_64& rng,
                                  bool zero_momentum = false, int mode_span = 0) {
  const SiteSet& S = *sp;
  std::uniform_int_distribution<int> K(-kmax, kmax), D(dmin, dmax);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<int> pool;
  for (int m = 0; m < S.mode_count(); ++m)
    if (std::abs(S.mode(m)) <= (mode_span > 0 ? mode_span : S.mode_cutoff())) pool.push_back(m);
  std::uniform_int_distribution<int> M(0, static_cast<int>(pool.size()) - 1);
  std::vector<FormalSeries::Term> v;
  int guard = 0;
  while (static_cast<int>(v.size()) < terms && guard++ < 200000) {
    Key key;
    int d = D(rng);
    int ya = S.n() ? std::uniform_int_distribution<int>(0, d / 2)(rng) : 0;
    for (int t = 0; t < ya; ++t) {
      int b = std::uniform_int_distribution<int>(0, S.n() - 1)(rng);
      key.set_i(b, key.i(b) + 1);
    }
    for (int t = 0; t < d - 2 * ya; ++t) key.add_var(2 * pool[M(rng)] + (rng() & 1));
    for (int b = 0; b < S.n(); ++b) key.set_k(b, K(rng));
    if (!budget.admits(key)) continue;
    if (zero_momentum && key_momentum(key, S) != 0) {
      // try to fix momentum with the first Fourier component
      if (S.n() == 0) continue;
      long p = key_momentum(key, S);
      long j0 = S.site(0);
      if (p % j0 != 0) continue;
      int nk = key.k(0) - static_cast<int>(p / j0);
      if (std::abs(nk) > kmax) continue;
      key.set_k(0, nk);
      if (!budget.admits(key) || key_momentum(key, S) != 0) continue;
    }
    v.emplace_back(key, cplx(U(rng), U(rng)));
  }
  return FormalSeries::from_terms(sp, budget, std::move(v));
}

inline FormalSeries homogeneous_part(const FormalSeries& s, int lo, int hi) {
  std::vector<FormalSeries::Term> v;
  for (auto& t : s.terms())
    if (t.first.degree() >= lo && t.first.degree() <= hi) v.push_back(t);
  return FormalSeries::from_terms(s.site_ptr(), s.budget(), std::move(v));
}

inline double rel_diff(const FormalSeries& a, const FormalSeries& b) {
  long double scale = std::max({max_abs_coeff(a), max_abs_coeff(b), 1e-300L});
  return static_cast<double>(max_abs_diff(a, b) / scale);
}

}  // namespace testing_util
