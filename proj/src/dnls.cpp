#include "dnlskam/dnls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace dnlskam {

namespace {

constexpr double kPi = std::numbers::pi;

double gamma_of(int j) { return std::sqrt(static_cast<double>(std::abs(j))); }

Key quartic_key(const SiteSet& s, int j, int k, int l, int m) {
  Key key;
  key.add_var(zid(s.mode_id(j)));
  key.add_var(zbid(s.mode_id(k)));
  key.add_var(zid(s.mode_id(l)));
  key.add_var(zbid(s.mode_id(m)));
  return key;
}

// z-part and zbar-part of a q-monomial as mode lists
void split_vars(const Key& key, const SiteSet& s, std::vector<int>& zs, std::vector<int>& zbs) {
  zs.clear();
  zbs.clear();
  for (int t = 0; t < key.nv(); ++t) {
    int id = key.var(t);
    (id & 1 ? zbs : zs).push_back(s.mode(id >> 1));
  }
}

bool is_B_key(const Key& key, const SiteSet& s) {
  std::vector<int> zs, zbs;
  split_vars(key, s, zs, zbs);
  std::sort(zs.begin(), zs.end());
  std::sort(zbs.begin(), zbs.end());
  return zs == zbs;
}

FormalSeries filter(const FormalSeries& H, const std::function<bool(const Key&)>& keep) {
  std::vector<FormalSeries::Term> out;
  for (auto& t : H.terms())
    if (keep(t.first)) out.push_back(t);
  FormalSeries r(H.site_ptr(), H.budget());
  r.mutable_terms() = std::move(out);
  return r;
}

double gen_binom(double p, int m) {
  double c = 1.0;
  for (int t = 0; t < m; ++t) c *= (p - t) / (t + 1);
  return c;
}

// sum_m |binom(p,m)| rho^m, full series
double binom_abs_sum(double p, double rho) {
  double total = 0.0, c = 1.0, pw = 1.0;
  for (int m = 0; m < 4000; ++m) {
    double term = std::abs(c) * pw;
    total += term;
    if (c == 0.0 || (m > 4 && term < 1e-18 * total)) break;
    c *= (p - m) / (m + 1);
    pw *= rho;
  }
  return total;
}

}  // namespace

void DnlsConfig::validate() const {
  if (mode_cutoff < 1) throw IndexError("empty mode set");
  if (N < 1 || N > mode_cutoff) throw IndexError("N must lie in [1, J_max]");
  if (degree_max < 4) throw IndexError("normal form budget must reach degree 4");
  for (auto& q : quintic)
    if (q.u_pow < 0 || q.ubar_pow < 0 || q.u_pow + q.ubar_pow < 5)
      throw IndexError("quintic entries need u-power + ubar-power >= 5");
}

bool in_delta1(const Key& key, const SiteSet& fourier, int N) {
  int low = 0;
  for (int t = 0; t < key.nv(); ++t)
    if (std::abs(fourier.mode(key.var(t) >> 1)) <= N) ++low;
  return low >= 2;
}

DnlsSplit build_dnls_hamiltonian(const DnlsConfig& cfg) {
  cfg.validate();
  DnlsSplit out;
  out.sites = std::make_shared<const SiteSet>(SiteSet::fourier(cfg.mode_cutoff));
  const SiteSet& s = *out.sites;
  TruncationBudget b;
  b.degree_max = cfg.degree_max;
  b.fourier_max = 0;
  b.mode_cutoff = cfg.mode_cutoff;
  out.budget = b;

  Accum lam(out.sites, b), B(out.sites, b), Q1(out.sites, b), Q2(out.sites, b), K(out.sites, b);
  for (int j : s.modes()) {
    Key key;
    key.add_var(zid(s.mode_id(j)));
    key.add_var(zbid(s.mode_id(j)));
    lam.add(key, static_cast<double>(sign(j)) * j * j);
  }

  const double pref = cfg.mu / (4.0 * kPi);
  for (int j : s.modes())
    for (int k : s.modes())
      for (int l : s.modes()) {
        int m = j - k + l;
        if (s.mode_id(m) < 0) continue;
        Key key = quartic_key(s, j, k, l, m);
        double c = pref * gamma_of(j) * gamma_of(k) * gamma_of(l) * gamma_of(m);
        if (j == k || j == m)
          B.add(key, c);
        else if (in_delta1(key, s, cfg.N))
          Q1.add(key, c);
        else
          Q2.add(key, c);
      }

  // K = int F(x, u, ubar) dx with u = sum gamma_j q_j e^{ijx}/sqrt(2 pi)
  for (auto& e : cfg.quintic) {
    const int deg = e.u_pow + e.ubar_pow;
    if (deg > b.degree_max) continue;
    const double norm = 2 * kPi * std::pow(2 * kPi, -0.5 * deg);
    std::vector<int> idx(deg);
    std::function<void(int, long, double)> rec = [&](int pos, long mom, double g) {
      if (pos == deg) {
        if (mom + e.kappa != 0) return;
        Key key;
        for (int t = 0; t < deg; ++t)
          key.add_var(t < e.u_pow ? zid(s.mode_id(idx[t])) : zbid(s.mode_id(idx[t])));
        K.add(key, e.c * static_cast<long double>(norm * g));
        return;
      }
      for (int j : s.modes()) {
        idx[pos] = j;
        rec(pos + 1, mom + (pos < e.u_pow ? j : -j), g * gamma_of(j));
      }
    };
    rec(0, 0, 1.0);
  }

  out.Lambda = lam.finish();
  out.B = B.finish();
  out.Q1 = Q1.finish();
  out.Q2 = Q2.finish();
  out.K = K.finish();
  return out;
}

BirkhoffResult partial_birkhoff(const DnlsSplit& H, const TruncationBudget& budget) {
  BirkhoffResult res;
  const SitePtr& sp = H.sites;
  Accum f4(sp, budget), unsolved(sp, budget);
  for (auto& [key, c] : H.Q1.terms()) {
    FormalSeries mono = FormalSeries::from_terms(sp, budget, {{key, 1.0}});
    cplx d = poisson_bracket(H.Lambda, mono, budget, Coordinates::fourier).coeff(key);
    if (std::abs(d) < 1e-12) {
      res.zero_divisors.push_back(key);
      unsolved.add(key, c);
      continue;
    }
    f4.add(key, -c / d);
  }
  res.F4 = f4.finish();

  const FormalSeries full = H.total().with_budget(budget);
  if (res.F4.empty()) {
    res.H_nf = full;
  } else {
    LieResult lr = lie_transform(full, res.F4, 0, budget);
    res.H_nf = lr.value;
    res.lie_orders = lr.orders;
  }
  res.normal4 = (H.Lambda + H.B + H.Q2).with_budget(budget);

  const FormalSeries low = filter(res.H_nf, [](const Key& k) { return k.degree() <= 4; });
  res.R = filter(res.H_nf, [](const Key& k) { return k.degree() >= 5; }) + unsolved.finish();
  const double scale = static_cast<double>(std::max(max_abs_coeff(res.normal4), 1e-300L));
  const FormalSeries low_solved = low - unsolved.finish();
  res.order4_mismatch = max_abs_diff(low_solved, res.normal4) / scale;

  const double q1scale = static_cast<double>(std::max(max_abs_coeff(H.Q1), 1e-300L));
  const SiteSet& s = *sp;
  for (auto& [key, c] : low_solved.terms()) {
    if (key.degree() != 4 || is_B_key(key, s) || H.Q2.coeff(key) != cplx(0.0)) continue;
    res.delta1_residual = std::max(res.delta1_residual, static_cast<double>(std::abs(c) / q1scale));
  }
  return res;
}

Frequencies affine_frequencies(const SiteSet& s, const std::vector<double>& xi) {
  const int n = s.n();
  if (static_cast<int>(xi.size()) != n) throw IndexError("xi has the wrong length");
  Frequencies f;
  double sum = 0.0;
  for (double v : xi) sum += v;
  for (int b = 0; b < n; ++b) {
    long j = s.site(b);
    f.om_int.push_back(j * j);
    f.om_small.push_back(static_cast<double>(j) * xi[b]);
  }
  const double slope = n > 0 ? sum / (n - 0.5) : 0.0;
  for (int j : s.modes()) {
    f.Om_int.push_back(static_cast<long>(j) * j);
    f.Om_small.push_back(j * slope);
  }
  return f;
}

double drift_parameter(const std::vector<double>& xi) {
  double sum = 0.0;
  for (double v : xi) sum += v;
  return 2.0 * sum / (2.0 * static_cast<double>(xi.size()) - 1.0);
}

Eigen::MatrixXd dxi_dzeta(const std::vector<int>& J) {
  const int n = static_cast<int>(J.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Ones(n, n);
  M.diagonal().setConstant(0.5);
  Eigen::VectorXd d(n);
  for (int b = 0; b < n; ++b) d[b] = std::abs(J[b]);
  return (M * d.asDiagonal()) / kPi;
}

Eigen::MatrixXd dxi_dzeta_inverse(const std::vector<int>& J) {
  const int n = static_cast<int>(J.size());
  Eigen::MatrixXd Mp = Eigen::MatrixXd::Ones(n, n);
  Mp.diagonal().setConstant(1.5 - n);
  Eigen::VectorXd d(n);
  for (int b = 0; b < n; ++b) d[b] = 1.0 / std::abs(J[b]);
  return (4 * kPi / (2 * n - 1)) * (d.asDiagonal() * Mp);
}

std::vector<double> zeta_from_xi(const std::vector<int>& J, const std::vector<double>& xi) {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size());
  Eigen::VectorXd z = dxi_dzeta_inverse(J) * x;
  return {z.data(), z.data() + z.size()};
}

std::vector<double> xi_from_zeta(const std::vector<int>& J, const std::vector<double>& zeta) {
  Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(zeta.data(), zeta.size());
  Eigen::VectorXd x = dxi_dzeta(J) * z;
  return {x.data(), x.data() + x.size()};
}

FrequencyData frequency_maps(const SitePtr& sites, const ParameterGrid& grid,
                             bool bypass_admissibility) {
  if (!bypass_admissibility && admissible(sites->sites()) != Verdict::admissible)
    throw IndexError("site set is not admissible: " + to_string(admissible(sites->sites())));
  FrequencyData fd;
  fd.sites = sites;
  fd.grid = grid;
  for (auto& xi : grid.points) fd.at.push_back(affine_frequencies(*sites, xi));
  fd.M1 = sites->c_J();
  const double n = sites->n();
  fd.M2 = n / (n - 0.5);
  return fd;
}

ParameterGrid default_parameter_box(const std::vector<int>& J, double r, int per_axis) {
  const int n = static_cast<int>(J.size());
  if (n < 2) throw IndexError("parameter box needs n >= 2");
  // |xi|_2 <= r^{3/2}; zeta > 0 on [f rho, rho]^n iff f > (2n-3)/(2n-2)
  const double rho = std::pow(r, 1.5) / std::sqrt(static_cast<double>(n));
  const double f0 = (2.0 * n - 3.0) / (2.0 * n - 2.0);
  const double lo_frac = f0 + 0.1 * (1.0 - f0);
  std::vector<double> lo(n, lo_frac * rho), hi(n, rho);
  return ParameterGrid::box(lo, hi, std::vector<int>(n, per_axis));
}

FormalSeries reduce_series(const FormalSeries& H, const SitePtr& sites,
                           const std::vector<double>& zeta, const TruncationBudget& budget,
                           double r, double s, int expansion_order, double* tail) {
  const SiteSet& src = H.sites();
  const SiteSet& dst = *sites;
  const int n = dst.n();
  Accum acc(sites, budget);
  double tail_sum = 0.0;
  std::vector<double> rho(n);
  for (int b = 0; b < n; ++b) rho[b] = r * r / zeta[b];

  for (auto& [key, c] : H.terms()) {
    std::vector<int> a(n, 0), cb(n, 0);
    Key base;
    bool dropped = false;
    int nz = 0;
    for (int t = 0; t < key.nv(); ++t) {
      int id = key.var(t);
      int j = src.mode(id >> 1);
      int b = dst.site_index(j);
      if (b >= 0) {
        (id & 1 ? cb : a)[b] += 1;
        continue;
      }
      int mid = dst.mode_id(j);
      if (mid < 0) {
        dropped = true;
        break;
      }
      base.add_var(id & 1 ? zbid(mid) : zid(mid));
      ++nz;
    }
    if (dropped) continue;
    std::vector<double> p(n);
    long double amp = std::abs(c);
    int kabs = 0;
    for (int b = 0; b < n; ++b) {
      base.set_k(b, a[b] - cb[b]);
      kabs += std::abs(a[b] - cb[b]);
      p[b] = 0.5 * (a[b] + cb[b]);
      amp *= std::pow(static_cast<long double>(zeta[b]), static_cast<long double>(p[b]));
    }
    double full = 1.0;
    for (int b = 0; b < n; ++b) full *= binom_abs_sum(p[b], rho[b]);

    // enumerate y-powers m_b
    double kept = 0.0;
    std::vector<int> m(n, 0);
    std::function<void(int, long double, double, int)> rec = [&](int b, long double coef, double mass,
                                                            int deg) {
      if (b == n) {
        Key k2 = base;
        for (int t = 0; t < n; ++t) k2.set_i(t, m[t]);
        if (!budget.admits(k2)) return;
        acc.add(k2, c * coef);
        kept += mass;
        return;
      }
      for (int mb = 0; mb <= expansion_order; ++mb) {
        double bc = gen_binom(p[b], mb);
        if (bc == 0.0) break;
        if (deg + 2 * mb > budget.degree_max) break;
        m[b] = mb;
        rec(b + 1, coef * bc * std::pow(static_cast<long double>(zeta[b]), static_cast<long double>(p[b] - mb)),
            mass * std::abs(bc) * std::pow(rho[b], mb), deg + 2 * mb);
      }
      m[b] = 0;
    };
    rec(0, 1.0L, 1.0, nz);
    tail_sum += static_cast<double>(amp * std::max(0.0, full - kept) * std::pow(static_cast<long double>(r), nz) *
                                    std::exp(kabs * s));
  }
  if (tail) *tail = tail_sum;
  return acc.finish();
}

ReducedHamiltonian action_angle_reduce(const BirkhoffResult& nf, const SitePtr& sites,
                                       const std::vector<double>& xi, double r, double s,
                                       const TruncationBudget& budget, int expansion_order) {
  ReducedHamiltonian out;
  out.sites = sites;
  out.budget = budget;
  out.xi = xi;
  out.zeta = zeta_from_xi(sites->sites(), xi);
  double zmin = 1e300;
  for (double z : out.zeta) {
    if (!(z > 0.0)) throw IndexError("zeta_b <= 0: parameter point outside the action domain");
    zmin = std::min(zmin, z);
  }
  if (r * r >= zmin) throw IndexError("r^2 >= min zeta_b: binomial expansion leaves its domain");
  out.rho = r * r / zmin;

  const SiteSet& src = nf.H_nf.sites();
  // Lambda + B: the order-4 normal part without Q2
  FormalSeries lamB = filter(nf.normal4, [&](const Key& k) {
    return k.degree() == 2 || (k.degree() == 4 && is_B_key(k, src));
  });
  FormalSeries rest = nf.normal4 - lamB;  // Q2
  double t1 = 0, t2 = 0, t3 = 0;
  FormalSeries LB = reduce_series(lamB, sites, out.zeta, budget, r, s, expansion_order, &t1);
  FormalSeries Q2r = reduce_series(rest, sites, out.zeta, budget, r, s, expansion_order, &t2);
  FormalSeries Rr = reduce_series(nf.R, sites, out.zeta, budget, r, s, expansion_order, &t3);
  out.binomial_tail = t1 + t2 + t3;

  auto constant = [](const Key& k) { return k.degree() == 0 && k.kabs() == 0; };
  out.lambda_b_linear = filter(LB, [](const Key& k) { return in_normal_part(k) && k.degree() > 0; });
  out.Qtilde = filter(LB, [&](const Key& k) { return !in_normal_part(k); });
  out.P = out.Qtilde + filter(Q2r, [&](const Key& k) { return !constant(k); }) +
          filter(Rr, [&](const Key& k) { return !constant(k); });
  return out;
}

}  // namespace dnlskam
