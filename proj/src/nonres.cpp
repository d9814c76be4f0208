#include "dnlskam/nonres.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace dnlskam {

namespace {

using i128 = __int128;

i128 abs128(i128 v) { return v < 0 ? -v : v; }

double affine_small_omega(const std::vector<double>& xi, const SiteSet& s, int b) {
  return static_cast<double>(s.site(b)) * xi[b];
}

double affine_small_Omega(const std::vector<double>& xi, int n, int j) {
  double sum = 0.0;
  for (double v : xi) sum += v;
  return j * sum / (n - 0.5);
}

// range of A + g.xi over the box
std::pair<double, double> box_range(const AffineDivisor& d, const std::vector<double>& lo,
                                    const std::vector<double>& hi) {
  double a = static_cast<double>(d.A), b = a;
  for (size_t t = 0; t < d.num.size(); ++t) {
    double g = d.grad(static_cast<int>(t));
    a += std::min(g * lo[t], g * hi[t]);
    b += std::max(g * lo[t], g * hi[t]);
  }
  return {a, b};
}

double dist_to_zero(std::pair<double, double> r) {
  if (r.first <= 0.0 && r.second >= 0.0) return 0.0;
  return std::min(std::abs(r.first), std::abs(r.second));
}

// volume of {u in prod [0,L_b]: sum a_b u_b <= c}, a_b > 0
long double simplex_box(const std::vector<long double>& a, const std::vector<long double>& L,
                        long double c) {
  const size_t m = a.size();
  long double total = 1.0L, top = 0.0L;
  for (size_t b = 0; b < m; ++b) {
    total *= L[b];
    top += a[b] * L[b];
  }
  if (c <= 0) return 0.0L;
  if (c >= top) return total;
  if (c > 0.5L * top) return total - simplex_box(a, L, top - c);
  long double fact = 1.0L, prod = 1.0L;
  for (size_t b = 0; b < m; ++b) {
    fact *= static_cast<long double>(b + 1);
    prod *= a[b];
  }
  long double sum = 0.0L;
  for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
    long double shift = 0.0L;
    int bits = 0;
    for (size_t b = 0; b < m; ++b)
      if (mask >> b & 1) {
        shift += a[b] * L[b];
        ++bits;
      }
    long double rem = c - shift;
    if (rem <= 0) continue;
    long double pw = std::pow(rem, static_cast<long double>(m));
    sum += (bits % 2 ? -pw : pw);
  }
  return std::clamp(sum / (fact * prod), 0.0L, total);
}

long double halfspace_volume(const std::vector<double>& lo, const std::vector<double>& hi,
                             const std::vector<double>& g, double c) {
  long double base = 0.0L, inert = 1.0L;
  std::vector<long double> a, L;
  for (size_t b = 0; b < g.size(); ++b) {
    long double len = static_cast<long double>(hi[b]) - lo[b];
    if (g[b] == 0.0) {
      inert *= len;
      continue;
    }
    base += static_cast<long double>(g[b]) * (g[b] > 0 ? lo[b] : hi[b]);
    a.push_back(std::abs(static_cast<long double>(g[b])));
    L.push_back(len);
  }
  if (a.empty()) return (c >= base ? inert : 0.0L);
  return inert * simplex_box(a, L, static_cast<long double>(c) - base);
}

std::vector<std::vector<double>> corrections_max(const FrequencyData& fd, double& dom) {
  // per-mode max |Omega correction|, and the max omega correction in dom
  const SiteSet& s = *fd.sites;
  std::vector<std::vector<double>> out(1, std::vector<double>(s.mode_count(), 0.0));
  dom = 0.0;
  for (size_t p = 0; p < fd.at.size(); ++p) {
    const auto& xi = fd.grid.points[p];
    for (int b = 0; b < s.n(); ++b)
      dom = std::max(dom, std::abs(fd.at[p].om_small[b] - affine_small_omega(xi, s, b)));
    for (int id = 0; id < s.mode_count(); ++id)
      out[0][id] = std::max(
          out[0][id], std::abs(fd.at[p].Om_small[id] - affine_small_Omega(xi, s.n(), s.mode(id))));
  }
  return out;
}

}  // namespace

void DivisorSpec::validate(const SiteSet& s) const {
  if (static_cast<int>(k.size()) != s.n()) throw IndexError("k has the wrong length");
  if (l_abs() > 2) throw IndexError("|l| must be at most 2");
  for (size_t t = 0; t < l.size(); ++t) {
    if (l[t].first == 0 || s.is_site(l[t].first))
      throw IndexError("l must live on normal modes");
    if (t > 0 && l[t].first <= l[t - 1].first) throw IndexError("l entries must be sorted");
  }
}

int DivisorSpec::k_abs() const {
  int a = 0;
  for (int v : k) a += std::abs(v);
  return a;
}

int DivisorSpec::l_abs() const {
  int a = 0;
  for (auto& [j, c] : l) a += std::abs(c);
  return a;
}

long DivisorSpec::jl_sum() const {
  long a = 0;
  for (auto& [j, c] : l) a += std::abs(static_cast<long>(j) * c);
  return a;
}

double DivisorSpec::l_inf_bracket() const {
  long m = 1;
  for (auto& [j, c] : l) m = std::max(m, std::abs(static_cast<long>(j) * c));
  return static_cast<double>(m);
}

int DivisorSpec::drift_pair() const {
  if (l.size() != 2) return 0;
  if (l[0].first != -l[1].first) return 0;
  if (std::abs(l[0].second) != 1 || l[0].second != -l[1].second) return 0;
  return std::abs(l[0].first);
}

std::string DivisorSpec::str() const {
  std::string s = "k=(";
  for (size_t b = 0; b < k.size(); ++b) s += (b ? "," : "") + std::to_string(k[b]);
  s += ") l=";
  if (l.empty()) s += "0";
  for (size_t t = 0; t < l.size(); ++t) {
    int c = l[t].second;
    s += (c > 0 ? (t ? "+" : "") : "-");
    if (std::abs(c) != 1) s += std::to_string(std::abs(c));
    s += "e" + std::to_string(l[t].first);
  }
  return s;
}

bool AffineDivisor::identically_zero() const {
  if (A != 0) return false;
  for (auto v : num)
    if (v != 0) return false;
  return true;
}

AffineDivisor affine_divisor(const DivisorSpec& spec, const std::vector<int>& J) {
  const long long n = static_cast<long long>(J.size());
  AffineDivisor d;
  d.den = 2 * n - 1;
  long long L = 0;
  for (auto& [j, c] : spec.l) {
    d.A += static_cast<long long>(c) * j * j;
    L += static_cast<long long>(c) * j;
  }
  for (size_t b = 0; b < J.size(); ++b) {
    d.A += static_cast<long long>(spec.k[b]) * J[b] * J[b];
    d.num.push_back(d.den * spec.k[b] * J[b] + 2 * L);
  }
  return d;
}

double site_frequency(const FrequencyData& fd, size_t p, int b) { return fd.at[p].omega(b); }

namespace {
// parts that vary with the parameter; differences of these avoid the j^2 cancellation
double mode_small(const FrequencyData& fd, size_t p, int j) {
  int id = fd.sites->mode_id(j);
  if (id >= 0) return fd.at[p].Om_small[id];
  return affine_small_Omega(fd.grid.points[p], fd.sites->n(), j);
}
}  // namespace

double mode_frequency(const FrequencyData& fd, size_t p, int j) {
  const SiteSet& s = *fd.sites;
  if (j == 0) return 0.0;
  int id = s.mode_id(j);
  if (id >= 0) return fd.at[p].Omega(id);
  if (s.is_site(j)) throw IndexError("site index used as a normal mode");
  return static_cast<double>(j) * j + affine_small_Omega(fd.grid.points[p], s.n(), j);
}

double divisor(const DivisorSpec& spec, const Frequencies& f, const SiteSet& s) {
  long long A = 0;
  double small = 0.0;
  for (int b = 0; b < s.n(); ++b) {
    A += static_cast<long long>(spec.k[b]) * f.om_int[b];
    small += spec.k[b] * f.om_small[b];
  }
  for (auto& [j, c] : spec.l) {
    int id = s.mode_id(j);
    if (id < 0) throw IndexError("mode outside the tabulated range");
    A += static_cast<long long>(c) * f.Om_int[id];
    small += c * f.Om_small[id];
  }
  return static_cast<double>(A) + small;
}

double divisor(const DivisorSpec& spec, const FrequencyData& fd, size_t p) {
  const SiteSet& s = *fd.sites;
  const Frequencies& f = fd.at[p];
  long long A = 0;
  double small = 0.0;
  for (int b = 0; b < s.n(); ++b) {
    A += static_cast<long long>(spec.k[b]) * f.om_int[b];
    small += spec.k[b] * f.om_small[b];
  }
  for (auto& [j, c] : spec.l) {
    A += static_cast<long long>(c) * j * j;
    int id = s.mode_id(j);
    small += c * (id >= 0 ? f.Om_small[id] : affine_small_Omega(fd.grid.points[p], s.n(), j));
  }
  return static_cast<double>(A) + small;
}

std::string to_string(const Lemma32Result& r) {
  switch (r.kind) {
    case Lemma32::inequality_0: return "inequality_0";
    case Lemma32::inequality_b: return "inequality_" + std::to_string(r.b + 1);
    case Lemma32::none: return "none";
  }
  return "?";
}

Lemma32Result lemma32(const std::vector<int>& k, const std::vector<std::pair<int, int>>& l,
                      const std::vector<int>& J) {
  const i128 n = static_cast<i128>(J.size());
  i128 S = 0, A = 0, L = 0, kabs = 0, jl = 0;
  for (int j : J) S += std::abs(j);
  for (size_t b = 0; b < J.size(); ++b) {
    A += static_cast<i128>(k[b]) * J[b] * J[b];
    kabs += std::abs(k[b]);
  }
  for (auto& [j, c] : l) {
    A += static_cast<i128>(c) * j * j;
    L += static_cast<i128>(c) * j;
    jl += abs128(static_cast<i128>(c) * j);
  }
  const i128 mx = std::max(kabs, jl);
  Lemma32Result r;
  // |A| >= mx/(100n)
  if (100 * n * abs128(A) >= mx) {
    r.kind = Lemma32::inequality_0;
    return r;
  }
  // |k_b j_b + L/(n-1/2)| >= mx/(100 n S)
  for (size_t b = 0; b < J.size(); ++b) {
    i128 lhs = 100 * n * S * abs128((2 * n - 1) * k[b] * J[b] + 2 * L);
    if (lhs >= (2 * n - 1) * mx) {
      r.kind = Lemma32::inequality_b;
      r.b = static_cast<int>(b);
      return r;
    }
  }
  return r;
}

std::vector<std::vector<int>> enumerate_k(int n, int kmax) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, 0);
  auto rec = [&](auto&& self, int b, int left) -> void {
    if (b == n) {
      out.push_back(k);
      return;
    }
    for (int v = -left; v <= left; ++v) {
      k[b] = v;
      self(self, b + 1, left - std::abs(v));
    }
    k[b] = 0;
  };
  rec(rec, 0, kmax);
  return out;
}

std::vector<std::vector<std::pair<int, int>>> enumerate_l(const SiteSet& s, int mode_max) {
  std::vector<int> modes;
  for (int j = -mode_max; j <= mode_max; ++j)
    if (j != 0 && !s.is_site(j)) modes.push_back(j);
  std::vector<std::vector<std::pair<int, int>>> out;
  out.push_back({});
  for (int j : modes)
    for (int c : {-2, -1, 1, 2}) out.push_back({{j, c}});
  for (size_t a = 0; a < modes.size(); ++a)
    for (size_t b = a + 1; b < modes.size(); ++b)
      for (int ca : {-1, 1})
        for (int cb : {-1, 1}) out.push_back({{modes[a], ca}, {modes[b], cb}});
  return out;
}

AssumptionAudit audit_assumptions(const FrequencyData& fd, const EnumRanges& ranges) {
  const SiteSet& s = *fd.sites;
  const ParameterGrid& g = fd.grid;
  if (g.size() == 0) throw IndexError("audit needs a nonempty grid");
  if (ranges.k_max < 0 || ranges.mode_max < 1) throw IndexError("empty enumeration range");
  const int n = s.n();
  AssumptionAudit au;
  long S = s.site_abs_sum();
  au.M1_paper = s.c_J();
  au.M2_paper = n / (n - 0.5);
  au.M3_paper = 1.0 / (100.0 * n * S);
  const size_t cap = 8;
  auto witness = [&](const std::string& a, const std::string& d, double v, double bd) {
    size_t same = 0;
    for (auto& w : au.witnesses) same += (w.assumption == a);
    if (same < cap) au.witnesses.push_back({a, d, v, bd});
  };

  // (A) over Z_* and 0
  std::vector<int> idx{0};
  for (int j = -ranges.mode_max; j <= ranges.mode_max; ++j)
    if (j != 0 && !s.is_site(j)) idx.push_back(j);
  au.m = 1e300;
  for (size_t p = 0; p < g.size(); ++p) {
    std::vector<double> Om(idx.size());
    for (size_t t = 0; t < idx.size(); ++t) Om[t] = mode_frequency(fd, p, idx[t]);
    for (size_t a = 0; a < idx.size(); ++a)
      for (size_t b = a + 1; b < idx.size(); ++b) {
        long d2 = static_cast<long>(idx[a]) * idx[a] - static_cast<long>(idx[b]) * idx[b];
        if (d2 == 0) continue;
        double ratio = std::abs(Om[a] - Om[b]) / std::abs(static_cast<double>(d2));
        if (ratio < au.m) au.m = ratio;
        if (ratio < au.m_paper)
          witness("A", "i=" + std::to_string(idx[a]) + " j=" + std::to_string(idx[b]), ratio,
                  au.m_paper);
      }
  }

  // (B) difference quotients in the sup norm on the parameter
  std::vector<std::pair<int, int>> pairs;
  if (g.size() <= 1500) {
    for (size_t a = 0; a < g.size(); ++a)
      for (size_t b = a + 1; b < g.size(); ++b) pairs.emplace_back(int(a), int(b));
  } else {
    pairs = g.pairs;
  }
  for (auto [a, b] : pairs) {
    double dx = 0.0;
    for (int t = 0; t < n; ++t) dx = std::max(dx, std::abs(g.points[a][t] - g.points[b][t]));
    if (dx == 0.0) continue;
    double dw = 0.0;
    for (int t = 0; t < n; ++t)
      dw = std::max(dw, std::abs(fd.at[a].om_small[t] - fd.at[b].om_small[t]));
    au.M1 = std::max(au.M1, dw / dx);
    for (int j = -ranges.mode_max; j <= ranges.mode_max; ++j) {
      if (j == 0 || s.is_site(j)) continue;
      double q = std::abs(mode_small(fd, a, j) - mode_small(fd, b, j)) / std::abs(j) / dx;
      au.M2 = std::max(au.M2, q);
    }
  }
  if (au.M1 > au.M1_paper * (1 + 1e-12)) witness("B1", "grid quotient", au.M1, au.M1_paper);
  if (au.M2 > au.M2_paper * (1 + 1e-12)) witness("B2", "grid quotient", au.M2, au.M2_paper);

  // (C) with the exact affine divisors and the lemma dichotomy
  au.M3 = 1e300;
  auto ks = enumerate_k(n, ranges.k_max);
  auto ls = enumerate_l(s, ranges.mode_max);
  DivisorSpec spec;
  for (auto& k : ks)
    for (auto& l : ls) {
      spec.k = k;
      spec.l = l;
      long mx = spec.max_size();
      if (mx == 0) continue;
      ++au.specs_checked;
      AffineDivisor d = affine_divisor(spec, s.sites());
      double inf = dist_to_zero(box_range(d, g.lo, g.hi));
      double gn = 0.0;
      for (int b = 0; b < n; ++b) gn += d.grad(b) * d.grad(b);
      double val = (inf + std::sqrt(gn)) / static_cast<double>(mx);
      au.M3 = std::min(au.M3, val);
      if (val < au.M3_paper * (1 - 1e-12)) witness("C", spec.str(), val, au.M3_paper);
      if (lemma32(k, l, s.sites()).kind == Lemma32::none) {
        ++au.lemma32_none;
        witness("lemma32", spec.str(), 0.0, 0.0);
      }
    }
  return au;
}

double slab_volume(const std::vector<double>& lo, const std::vector<double>& hi,
                   const std::vector<double>& g, double c_lo, double c_hi) {
  if (c_hi <= c_lo) return 0.0;
  long double v = halfspace_volume(lo, hi, g, c_hi) - halfspace_volume(lo, hi, g, c_lo);
  return static_cast<double>(std::max(0.0L, v));
}

ResonanceZone resonance_zone(const DivisorSpec& spec, double alpha, double tau,
                             const FrequencyData& fd, bool affine,
                             const std::vector<char>* active) {
  const SiteSet& s = *fd.sites;
  const ParameterGrid& g = fd.grid;
  ResonanceZone z;
  z.spec = spec;
  z.alpha = alpha;
  z.tau = tau;
  int dj = spec.drift_pair();
  z.weight = dj > 0 ? static_cast<double>(dj) : spec.l_inf_bracket();
  z.threshold = alpha * z.weight / std::pow(spec.k_bracket(), tau);
  z.excluded.assign(g.size(), 0);
  z.min_abs = 1e300;
  AffineDivisor ad = affine_divisor(spec, s.sites());
  z.identically_zero = affine && ad.identically_zero();
  for (size_t p = 0; p < g.size(); ++p) {
    if (active && !(*active)[p]) continue;
    double D = divisor(spec, fd, p);
    z.min_abs = std::min(z.min_abs, std::abs(D));
    if (std::abs(D) < z.threshold) {
      z.excluded[p] = 1;
      ++z.excluded_count;
    }
  }
  z.grid_measure = z.excluded_count * g.cell_volume();
  if (affine) {
    std::vector<double> grad(s.n());
    for (int b = 0; b < s.n(); ++b) grad[b] = ad.grad(b);
    const double A = static_cast<double>(ad.A);
    z.analytic_measure = slab_volume(g.lo, g.hi, grad, -z.threshold - A, z.threshold - A);
    // cells whose range of D straddles +-threshold
    double half = 0.0;
    for (int b = 0; b < s.n(); ++b)
      half += std::abs(grad[b]) * 0.5 * (g.hi[b] - g.lo[b]) / g.shape[b];
    for (size_t p = 0; p < g.size(); ++p) {
      double c = A;
      for (int b = 0; b < s.n(); ++b) c += grad[b] * g.points[p][b];
      for (double t : {z.threshold, -z.threshold})
        if (c - half <= t && t <= c + half) {
          ++z.crossing_cells;
          break;
        }
    }
  }
  return z;
}

void ExclusionLedger::add(StepExclusion st) {
  if (cumulative.empty()) cumulative.assign(grid.size(), 0);
  for (size_t p = 0; p < grid.size(); ++p)
    if (st.mask1[p] || st.mask2[p]) cumulative[p] = 1;
  steps.push_back(std::move(st));
}

double ExclusionLedger::excluded_fraction() const {
  if (grid.size() == 0 || cumulative.empty()) return 0.0;
  size_t c = 0;
  for (char v : cumulative) c += v != 0;
  return static_cast<double>(c) / grid.size();
}

std::vector<char> ExclusionLedger::active() const {
  std::vector<char> a(grid.size(), 1);
  for (size_t p = 0; p < cumulative.size(); ++p) a[p] = !cumulative[p];
  return a;
}

StepExclusion exclude_step(const FrequencyData& fd, const EnumRanges& ranges, int nu,
                           double alpha1, double alpha2, double tau, int Pi,
                           const std::vector<char>* active, bool affine,
                           std::vector<ResonanceZone>* keep, size_t cap) {
  const SiteSet& s = *fd.sites;
  const ParameterGrid& g = fd.grid;
  StepExclusion st;
  st.nu = nu;
  st.alpha1 = alpha1;
  st.alpha2 = alpha2;
  st.tau = tau;
  st.Pi = Pi;
  st.mask1.assign(g.size(), 0);
  st.mask2.assign(g.size(), 0);
  double dom = 0.0;
  auto dOm = corrections_max(fd, dom)[0];

  auto ks = enumerate_k(s.n(), ranges.k_max);
  auto ls = enumerate_l(s, ranges.mode_max);
  DivisorSpec spec;
  for (auto& k : ks) {
    bool kzero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    for (auto& l : ls) {
      spec.k = k;
      spec.l = l;
      int dj = spec.drift_pair();
      const bool fam2 = dj > 0;
      if (fam2) {
        if (dj > Pi || l[0].second != 1) continue;  // e_{-j} - e_j with j > 0 covers both signs
      } else if (kzero) {
        continue;
      }
      ++st.specs;
      const double alpha = fam2 ? alpha2 : alpha1;
      const double weight = fam2 ? static_cast<double>(dj) : spec.l_inf_bracket();
      const double thr = alpha * weight / std::pow(spec.k_bracket(), tau);
      AffineDivisor ad = affine_divisor(spec, s.sites());
      double margin = spec.k_abs() * dom;
      for (auto& [j, c] : l) {
        int id = s.mode_id(j);
        if (id >= 0) margin += std::abs(c) * dOm[id];
      }
      if (dist_to_zero(box_range(ad, g.lo, g.hi)) - margin >= thr) continue;
      ResonanceZone z = resonance_zone(spec, alpha, tau, fd, affine, active);
      if (z.identically_zero) st.identically_zero = true;
      auto& mask = fam2 ? st.mask2 : st.mask1;
      for (size_t p = 0; p < g.size(); ++p)
        if (z.excluded[p]) mask[p] = 1;
      if (z.analytic_measure) (fam2 ? st.analytic2 : st.analytic1) += *z.analytic_measure;
      if (z.excluded_count > 0) {
        (fam2 ? st.zones2 : st.zones1) += 1;
        if (keep && keep->size() < cap) keep->push_back(std::move(z));
      }
    }
  }
  auto count = [&](const std::vector<char>& m) {
    size_t c = 0;
    for (char v : m) c += v != 0;
    return c * g.cell_volume();
  };
  st.grid1 = count(st.mask1);
  st.grid2 = count(st.mask2);
  return st;
}

MeasureReport measure_report(const ExclusionLedger& ledger, double alpha, double rho) {
  MeasureReport rep;
  rep.rho = rho;
  rep.box_volume = ledger.grid.size() ? ledger.grid.box_volume() : 0.0;
  rep.excluded_fraction = ledger.excluded_fraction();
  if (ledger.grid.size() == 0) return rep;
  std::vector<char> t1(ledger.grid.size(), 0), t2(ledger.grid.size(), 0);
  for (auto& st : ledger.steps) {
    for (size_t p = 0; p < t1.size(); ++p) {
      if (st.mask1[p]) t1[p] = 1;
      if (st.mask2[p]) t2[p] = 1;
    }
    rep.theta1_analytic += st.analytic1;
    rep.theta2_analytic += st.analytic2;
  }
  const double cv = ledger.grid.cell_volume();
  for (size_t p = 0; p < t1.size(); ++p) {
    rep.theta1_grid += t1[p] ? cv : 0.0;
    rep.theta2_grid += t2[p] ? cv : 0.0;
  }
  const int n = static_cast<int>(ledger.grid.lo.size());
  const double total = rep.excluded_fraction * rep.box_volume;
  if (alpha > 0 && rho > 0) rep.bound_constant = total / (std::pow(rho, n - 1) * alpha);
  return rep;
}

void alpha_sweep(const FrequencyData& fd, const EnumRanges& ranges, double alpha0,
                 double alpha2_ratio, double tau, int Pi, int doublings, MeasureReport& rep) {
  rep.sweep_alpha.clear();
  rep.sweep_measure.clear();
  double a = alpha0;
  for (int d = 0; d <= doublings; ++d, a *= 2) {
    StepExclusion st = exclude_step(fd, ranges, 0, a, a * alpha2_ratio, tau, Pi, nullptr, true);
    rep.sweep_alpha.push_back(a);
    rep.sweep_measure.push_back(st.analytic1 + st.analytic2);
  }
  double acc = 0.0;
  int cnt = 0;
  for (size_t t = 1; t < rep.sweep_measure.size(); ++t) {
    if (rep.sweep_measure[t - 1] <= 0) continue;
    acc += std::log2(rep.sweep_measure[t] / rep.sweep_measure[t - 1]);
    ++cnt;
  }
  rep.slope = cnt ? acc / cnt : 0.0;
}

void write_zone_csv(std::ostream& os, const std::vector<ResonanceZone>& zones) {
  os << "spec,weight,min_abs_D,excluded_fraction,analytic_measure\n";
  char buf[256];
  for (auto& z : zones) {
    double frac = z.excluded.empty() ? 0.0 : double(z.excluded_count) / z.excluded.size();
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,", z.weight, z.min_abs, frac);
    os << '"' << z.spec.str() << '"' << buf;
    if (z.analytic_measure) {
      std::snprintf(buf, sizeof buf, "%.17g", *z.analytic_measure);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace dnlskam
