#include "dnlskam/appendix.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "dnlskam/fourier.hpp"

namespace dnlskam {

bool AppendixReport::all_passed() const {
  for (auto& t : tallies)
    if (!t.diagnostic && !t.ok()) return false;
  return !tallies.empty();
}

long lattice_shell_count(int n, int m) {
  if (m == 0) return 1;
  auto binom = [](long a, long b) {
    if (b < 0 || b > a) return 0L;
    long r = 1;
    for (long t = 1; t <= b; ++t) r = r * (a - b + t) / t;
    return r;
  };
  long c = 0;
  for (int d = 1; d <= std::min(n, m); ++d) c += (1L << d) * binom(n, d) * binom(m - 1, d - 1);
  return c;
}

real exp_sum(int n, double sigma, double nu, int kmax) {
  real acc = 0;
  for (int m = 0; m <= kmax; ++m) {
    real w = nu == 0 ? 1 : (m == 0 ? 0 : std::pow(static_cast<real>(m), static_cast<real>(nu)));
    acc += lattice_shell_count(n, m) * std::exp(-2 * static_cast<real>(sigma) * m) * w;
  }
  return acc;
}

real exp_sup(int n, double sigma, double nu, int kmax) {
  (void)n;
  real best = 0;
  for (int m = 1; m <= kmax; ++m)
    best = std::max(best, std::exp(-static_cast<real>(sigma) * m) * std::pow(static_cast<real>(m), static_cast<real>(nu)));
  return best;
}

namespace {

// floating-point slack on comparisons whose two sides are computed along different paths
constexpr double kRel = 1e-12;

struct Tally {
  InequalityTally t;
  void record(real lhs, real rhs, const std::string& witness) {
    double ratio = rhs > 0 ? static_cast<double>(lhs / rhs) : (lhs > 0 ? INFINITY : 0.0);
    t.worst_ratio = std::max(t.worst_ratio, ratio);
    if (lhs <= rhs * (1 + kRel)) {
      ++t.passed;
    } else {
      ++t.failed;
      if (t.witnesses.size() < 5) t.witnesses.push_back(witness);
    }
  }
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

const cplx I(0.0, 1.0);

cplx rand_c(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  return {U(rng), U(rng)};
}

// ---- Lemma 8.1 ----
void lemma81(int samples, int kmax, std::mt19937_64& rng, Tally& a, Tally& b, Tally& c) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < samples; ++t) {
    int n = 1 + static_cast<int>(U(rng) * 4);  // 1..4
    double sigma = 0.05 + 1.95 * U(rng);
    double nu = 0.05 + 9.95 * U(rng);
    const real e = std::exp(real(1));
    real base = std::pow(1 + e, static_cast<real>(n));
    real lhs = exp_sum(n, sigma, 0, kmax);
    a.record(lhs, base / std::pow(static_cast<real>(sigma), static_cast<real>(n)),
             fmt("n=%d sigma=%.17g", n, sigma));
    real pre = std::pow(static_cast<real>(nu) / e, static_cast<real>(nu));
    lhs = exp_sum(n, sigma, nu, kmax);
    b.record(lhs, pre * base / std::pow(static_cast<real>(sigma), static_cast<real>(nu + n)),
             fmt("n=%d sigma=%.17g nu=%.17g", n, sigma, nu));
    lhs = exp_sup(n, sigma, nu, kmax);
    c.record(lhs, pre / std::pow(static_cast<real>(sigma), static_cast<real>(nu)),
             fmt("n=%d sigma=%.17g nu=%.17g", n, sigma, nu));
  }
}

// ---- Lemma 8.2 ----
void lemma82(int samples, int kmax, std::mt19937_64& rng, Tally& out) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<std::vector<int>> site_sets = {{-1, 2}, {-2, 1, 3}};
  for (int t = 0; t < samples; ++t) {
    const auto& J = site_sets[t % 2];
    int n = static_cast<int>(J.size());
    FourierFunction u{n, 0, {}};
    int terms = 1 + static_cast<int>(U(rng) * 6);
    std::uniform_int_distribution<int> K(-kmax, kmax);
    while (static_cast<int>(u.c.size()) < terms) {
      std::vector<int> k(n);
      for (auto& v : k) v = K(rng);
      if (l1(k) > kmax) continue;
      u.c[k] = rand_c(rng);
    }
    double s = 0.05 + 0.95 * U(rng);
    double sigma = s * (0.01 + 0.98 * U(rng));
    double tau = (n + 1) + 7 * U(rng);
    double a = 0.5 * U(rng);
    real lhs = norm_tau(u, s - sigma, tau + 1);
    real rhs = std::pow(static_cast<real>(tau + 1) / std::exp(real(1)), static_cast<real>(tau + 1)) /
               std::pow(static_cast<real>(sigma), static_cast<real>(tau + 1)) * norm_am(u, s, a, J);
    out.record(lhs, rhs, fmt("s=%.17g sigma=%.17g tau=%.17g a=%.17g", s, sigma, tau, a));
  }
}

SitePtr appendix_sites() { return std::make_shared<const SiteSet>(std::vector<int>{-1, 2}, 6); }

long pi_k(const std::vector<int>& k, const SiteSet& S) {
  long p = 0;
  for (int b = 0; b < S.n(); ++b) p += static_cast<long>(k[b]) * S.site(b);
  return p;
}

// ---- Lemma 8.3 ----
void lemma83(int samples, int kmax, std::mt19937_64& rng, Tally& out) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto sp = appendix_sites();
  const SiteSet& S = *sp;
  TruncationBudget b{2, kmax, S.mode_cutoff()};
  std::uniform_int_distribution<int> M(0, S.mode_count() - 1), K(-kmax, kmax);
  for (int t = 0; t < samples; ++t) {
    double s = 0.05 + 0.9 * U(rng);
    double sigma = std::min(1.0, s / 2) * (0.02 + 0.96 * U(rng));
    double a_mom = 0.3 * U(rng), a_exp = 0.3 * U(rng), p = 3 * U(rng), r = 0.05 + 0.9 * U(rng);
    std::vector<FormalSeries::Term> rt, ft;
    int pairs = 1 + static_cast<int>(U(rng) * 6);
    for (int q = 0; q < pairs; ++q) {
      int mi = M(rng), mj = M(rng);
      int i = S.mode(mi), j = S.mode(mj);
      real budget = 0;
      int nk = 1 + static_cast<int>(U(rng) * 3);
      for (int u = 0; u < nk; ++u) {
        std::vector<int> k(2);
        do {
          k = {K(rng) / 4, K(rng) / 4};
        } while (l1(k) > kmax);
        cplx c = rand_c(rng);
        Key key;
        key.set_k(0, k[0]);
        key.set_k(1, k[1]);
        key.add_var(zid(mi));
        key.add_var(zbid(mj));
        rt.emplace_back(key, c);
        budget += std::abs(c) * std::exp(static_cast<real>(s) * l1(k) +
                                          static_cast<real>(a_mom) * std::labs(pi_k(k, S) + i - j));
      }
      budget /= std::max(std::abs(i), std::abs(j));
      // spread a fraction of the allowance over fresh Fourier modes
      double left = U(rng);
      int nf = 1 + static_cast<int>(U(rng) * 3);
      for (int u = 0; u < nf; ++u) {
        double frac = (u + 1 == nf) ? left : left * U(rng);
        left -= frac;
        std::vector<int> k(2);
        do {
          k = {K(rng) / 4, K(rng) / 4};
        } while (l1(k) > kmax);
        real w = std::exp(static_cast<real>(s - sigma) * l1(k) +
                          static_cast<real>(a_mom) * std::labs(pi_k(k, S) + i - j));
        cplx c = static_cast<double>(frac * budget / w) * std::polar(1.0, 2 * M_PI * U(rng));
        Key key;
        key.set_k(0, k[0]);
        key.set_k(1, k[1]);
        key.add_var(zid(mi));
        key.add_var(zbid(mj));
        ft.emplace_back(key, c);
      }
    }
    auto R = FormalSeries::from_terms(sp, b, rt);
    auto F = FormalSeries::from_terms(sp, b, ft);
    NormWeights wl{s - 2 * sigma, r, p, p, a_exp, a_mom};
    NormWeights wr{s, r, p, p - 1, a_exp, a_mom};
    real lhs = majorant_norm_hamiltonian(F, wl);
    real rhs = 3 / static_cast<real>(sigma) * majorant_norm_hamiltonian(R, wr);
    out.record(lhs, rhs, fmt("s=%.17g sigma=%.17g p=%.17g r=%.17g", s, sigma, p, r));
  }
}

VectorField random_field(const SitePtr& sp, TruncationBudget b, int kcap, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const SiteSet& S = *sp;
  VectorField X = VectorField::zero(sp, b);
  std::uniform_int_distribution<int> K(-kcap, kcap), M(0, S.mode_count() - 1);
  auto series = [&] {
    std::vector<FormalSeries::Term> v;
    int terms = static_cast<int>(U(rng) * 3);
    for (int q = 0; q < terms; ++q) {
      Key key;
      key.set_k(0, K(rng));
      key.set_k(1, K(rng));
      int d = static_cast<int>(U(rng) * 4);
      int ya = static_cast<int>(U(rng) * (d / 2 + 1));
      for (int u = 0; u < ya; ++u) {
        int s = static_cast<int>(U(rng) * 2);
        key.set_i(s, key.i(s) + 1);
      }
      for (int u = 0; u < d - 2 * ya; ++u) key.add_var(2 * M(rng) + static_cast<int>(U(rng) * 2));
      v.emplace_back(key, rand_c(rng));
    }
    return FormalSeries::from_terms(sp, b, v);
  };
  for (auto* fam : {&X.x, &X.y, &X.z, &X.zbar})
    for (auto& c : *fam)
      if (U(rng) < 0.4) c = series();
  return X;
}

// ---- Lemma 8.4 ----
void lemma84(int samples, int kmax, std::mt19937_64& rng, Tally& out) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto sp = appendix_sites();
  const int n = sp->n();
  TruncationBudget b{8, kmax, sp->mode_cutoff()};
  for (int t = 0; t < samples; ++t) {
    double s = 0.05 + 0.9 * U(rng), r = 0.05 + 0.9 * U(rng);
    double s2 = s * (0.5 + 0.4999 * U(rng)), r2 = r * (0.5 + 0.4999 * U(rng));
    double p = 1 + 2 * U(rng), q = p - 1;
    double a_exp = 0.2 * U(rng), a_mom = 0.2 * U(rng);
    auto X = random_field(sp, b, kmax / 4, rng);
    auto Y = random_field(sp, b, kmax / 4, rng);
    auto C = commutator(X, Y, b);
    NormWeights wl{s2, r2, p, q, a_exp, a_mom};
    NormWeights wx{s, r, p, q, a_exp, a_mom};
    NormWeights wy{s, r, p, p, a_exp, a_mom};
    real lhs = majorant_norm(C, wl);
    real mx = std::max(s / (s - s2), r / (r - r2));
    real rhs = std::pow(real(2), 2 * n + 3) * mx * majorant_norm(X, wx) * majorant_norm(Y, wy);
    out.record(lhs, rhs, fmt("s=%.17g s'=%.17g r=%.17g r'=%.17g", s, s2, r, r2));
  }
}

FormalSeries random_hamiltonian(const SitePtr& sp, TruncationBudget b, int dmin, int dmax, int kcap,
                                int terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const SiteSet& S = *sp;
  std::uniform_int_distribution<int> K(-kcap, kcap), M(0, S.mode_count() - 1), D(dmin, dmax);
  std::vector<FormalSeries::Term> v;
  for (int q = 0; q < terms; ++q) {
    Key key;
    key.set_k(0, K(rng));
    key.set_k(1, K(rng));
    int d = D(rng);
    int ya = static_cast<int>(U(rng) * (d / 2 + 1));
    for (int u = 0; u < ya; ++u) {
      int s = static_cast<int>(U(rng) * 2);
      key.set_i(s, key.i(s) + 1);
    }
    for (int u = 0; u < d - 2 * ya; ++u) key.add_var(2 * M(rng) + static_cast<int>(U(rng) * 2));
    v.emplace_back(key, rand_c(rng));
  }
  return FormalSeries::from_terms(sp, b, v);
}

// ---- Lemma 8.5 ----
void lemma85(int samples, int kmax, std::mt19937_64& rng, Tally& out, Tally& scaled) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto sp = appendix_sites();
  const int n = sp->n();
  const int D = 7;
  TruncationBudget b{D, kmax, sp->mode_cutoff()};
  for (int t = 0; t < samples; ++t) {
    double s = 0.05 + 0.9 * U(rng), r = 0.05 + 0.9 * U(rng);
    double s2 = s * (0.5 + 0.4999 * U(rng)), r2 = r * (0.5 + 0.4999 * U(rng));
    double p = 1 + 2 * U(rng), q = p - 1;
    double a_exp = 0.2 * U(rng), a_mom = 0.2 * U(rng);
    auto H = random_hamiltonian(sp, b, 0, 4, 4, 1 + static_cast<int>(U(rng) * 5), rng);
    auto F = random_hamiltonian(sp, b, 3, 4, 3, 1 + static_cast<int>(U(rng) * 4), rng);
    NormWeights wF{s, r, p, p, a_exp, a_mom};
    NormWeights wH{s, r, p, q, a_exp, a_mom};
    NormWeights wl{s2, r2, p, q, a_exp, a_mom};
    real mx = std::max(s / (s - s2), r / (r - r2));
    real c0 = std::pow(real(2), 2 * n + 5) * std::exp(real(1)) * mx;
    real theta = 0.95 * U(rng);
    real nf = majorant_norm_hamiltonian(F, wF);
    F = static_cast<double>(theta / (c0 * nf)) * F;
    auto HF = lie_transform(H, F, 0, b).value;
    real lhs = majorant_norm_hamiltonian(HF, wl);
    real rhs = majorant_norm_hamiltonian(H, wH) / (1 - c0 * majorant_norm_hamiltonian(F, wF));
    auto w = fmt("s=%.17g s'=%.17g r=%.17g r'=%.17g", s, s2, r, r2);
    out.record(lhs, rhs, w);
    scaled.record(lhs, rhs * std::max(s / s2, (r / r2) * (r / r2)), w);
  }
}

}  // namespace

std::pair<real, real> lemma85_zero_flow_instance(double s, double s2, double r, double r2) {
  auto sp = appendix_sites();
  TruncationBudget b{4, 8, sp->mode_cutoff()};
  Key y1;
  y1.set_i(0, 1);
  auto H = FormalSeries::from_terms(sp, b, {{y1, 1.0}});
  FormalSeries F(sp, b);
  auto HF = lie_transform(H, F, 0, b).value;
  real lhs = majorant_norm_hamiltonian(HF, NormWeights{s2, r2, 2, 1, 0, 0});
  real rhs = majorant_norm_hamiltonian(H, NormWeights{s, r, 2, 1, 0, 0});
  return {lhs, rhs};
}

AppendixReport verify_appendix_bounds(int sample_count, uint64_t seed, int kmax) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be positive");
  std::mt19937_64 rng(seed);
  Tally a, b, c, d, e, f, g, h;
  a.t.lemma = "8.1a";
  a.t.statement = "sum e^{-2|k|sigma} <= (1+e)^n / sigma^n";
  b.t.lemma = "8.1b";
  b.t.statement = "sum e^{-2|k|sigma}|k|^nu <= (nu/e)^nu (1+e)^n / sigma^{nu+n}";
  c.t.lemma = "8.1c";
  c.t.statement = "sup e^{-|k|sigma}|k|^nu <= (nu/e)^nu / sigma^nu";
  d.t.lemma = "8.2";
  d.t.statement = "|u|_{s-sigma,tau+1} <= ((tau+1)/e)^{tau+1} sigma^{-(tau+1)} |u|_{s,a,0}";
  e.t.lemma = "8.3";
  e.t.statement = "|X_<Fz,zbar>|_{s-2sigma,r,p} <= (3/sigma) |X_<Rz,zbar>|_{s,r,p-1}";
  f.t.lemma = "8.4";
  f.t.statement = "|[X,Y]|_{s',r',q} <= 2^{2n+3} max{s/(s-s'),r/(r-r')} |X|_{s,r,q} |Y|_{s,r,p}";
  g.t.lemma = "8.5";
  g.t.statement = "|X_{H o Phi_F}|_{s',r',q} <= |X_H|_{s,r,q} / (1 - 2^{2n+5} e max{..} |X_F|_{s,r,p})";
  lemma81(sample_count, kmax, rng, a, b, c);
  lemma82(sample_count, kmax, rng, d);
  lemma83(sample_count, kmax, rng, e);
  lemma84(sample_count, kmax, rng, f);
  h.t.lemma = "8.5-rescaled";
  h.t.statement = "8.5 with the domain factor max{s/s', (r/r')^2} on the right";
  h.t.diagnostic = true;
  lemma85(sample_count, kmax, rng, g, h);
  AppendixReport rep;
  for (auto* t : {&a, &b, &c, &d, &e, &f, &g, &h}) rep.tallies.push_back(t->t);
  return rep;
}

}  // namespace dnlskam
