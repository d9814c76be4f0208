#include "dnlskam/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dnlskam {

void NormWeights::validate() const {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("norm width s must lie in (0,1)");
  if (!(r > 0 && r < 1)) throw std::invalid_argument("norm radius r must lie in (0,1)");
  if (a_exp < 0 || a_mom < 0) throw std::invalid_argument("norm weights must be nonnegative");
}

PhasePoint PhasePoint::zero(const SiteSet& s) {
  PhasePoint v;
  v.x.assign(s.n(), 0.0);
  v.y.assign(s.n(), 0.0);
  v.z.assign(s.mode_count(), 0.0);
  v.zbar.assign(s.mode_count(), 0.0);
  return v;
}

namespace {

real mode_weight(int j, double a, double reg) {
  return std::exp(static_cast<real>(a) * std::abs(j)) * std::pow(static_cast<real>(std::abs(j)), reg);
}

real seq_norm(const std::vector<real>& mags, const SiteSet& s, double a, double reg) {
  real acc = 0;
  for (size_t m = 0; m < mags.size(); ++m) {
    real t = mode_weight(s.mode(static_cast<int>(m)), a, reg) * mags[m];
    acc += t * t;
  }
  return std::sqrt(acc);
}

// sup of |z_j| on the corner of D(r)
std::vector<real> corner_radii(const SiteSet& s, const NormWeights& w) {
  std::vector<real> c(s.mode_count());
  for (int m = 0; m < s.mode_count(); ++m)
    c[m] = static_cast<real>(w.r) / mode_weight(s.mode(m), w.a_exp, w.p);
  return c;
}

real corner(const Key& k, const std::vector<real>& cr, real r2) {
  real v = std::pow(r2, static_cast<real>(k.iabs()));
  for (int t = 0; t < k.nv(); ++t) v *= cr[k.var(t) >> 1];
  return v;
}

}  // namespace

real weighted_phase_norm(const PhasePoint& v, const SiteSet& s, const NormWeights& w, double reg) {
  real xm = 0, y1 = 0;
  for (auto& c : v.x) xm = std::max<real>(xm, std::abs(c));
  for (auto& c : v.y) y1 += std::abs(c);
  std::vector<real> zm(v.z.size()), zbm(v.zbar.size());
  for (size_t m = 0; m < v.z.size(); ++m) zm[m] = std::abs(v.z[m]);
  for (size_t m = 0; m < v.zbar.size(); ++m) zbm[m] = std::abs(v.zbar[m]);
  real r = w.r;
  return xm / w.s + y1 / (r * r) + seq_norm(zm, s, w.a_exp, reg) / r +
         seq_norm(zbm, s, w.a_exp, reg) / r;
}

real weighted_phase_norm(const PhasePoint& v, const SiteSet& s, const NormWeights& w) {
  return weighted_phase_norm(v, s, w, w.p);
}

real combine_sums(const ComponentSums& c, const SiteSet& s, const NormWeights& w) {
  real xm = 0, y1 = 0;
  for (real v : c.x) xm = std::max(xm, v);
  for (real v : c.y) y1 += v;
  real r = w.r;
  return xm / w.s + y1 / (r * r) + seq_norm(c.z, s, w.a_exp, w.q) / r +
         seq_norm(c.zbar, s, w.a_exp, w.q) / r;
}

ComponentSums component_sums(const VectorField& X, const NormWeights& w) {
  const SiteSet& S = *X.sites;
  auto cr = corner_radii(S, w);
  const real r2 = static_cast<real>(w.r) * w.r;
  ComponentSums out;
  out.x.assign(S.n(), 0);
  out.y.assign(S.n(), 0);
  out.z.assign(S.mode_count(), 0);
  out.zbar.assign(S.mode_count(), 0);
  auto sum = [&](const FormalSeries& f, long shift) {
    real acc = 0;
    for (auto& [k, c] : f.terms()) {
      long pi = key_momentum(k, S) + shift;
      acc += std::exp(static_cast<real>(w.a_mom) * std::labs(pi) +
                      static_cast<real>(w.s) * k.kabs()) *
             std::abs(c) * corner(k, cr, r2);
    }
    return acc;
  };
  for (int b = 0; b < S.n(); ++b) {
    out.x[b] = sum(X.x[b], 0);
    out.y[b] = sum(X.y[b], 0);
  }
  for (int m = 0; m < S.mode_count(); ++m) {
    out.z[m] = sum(X.z[m], -S.mode(m));
    out.zbar[m] = sum(X.zbar[m], S.mode(m));
  }
  return out;
}

real majorant_norm(const VectorField& X, const NormWeights& w) {
  if (!X.sites) return 0;
  return combine_sums(component_sums(X, w), *X.sites, w);
}

real majorant_norm_hamiltonian(const FormalSeries& H, const NormWeights& w) {
  if (!H.site_ptr()) return 0;
  const SiteSet& S = H.sites();
  auto cr = corner_radii(S, w);
  const real r2 = static_cast<real>(w.r) * w.r;
  ComponentSums out;
  out.x.assign(S.n(), 0);
  out.y.assign(S.n(), 0);
  out.z.assign(S.mode_count(), 0);
  out.zbar.assign(S.mode_count(), 0);
  for (auto& [k, c] : H.terms()) {
    real base = std::exp(static_cast<real>(w.a_mom) * std::labs(key_momentum(k, S)) +
                         static_cast<real>(w.s) * k.kabs()) *
                std::abs(c);
    real cor = corner(k, cr, r2);
    for (int b = 0; b < S.n(); ++b) {
      if (k.i(b)) out.x[b] += base * k.i(b) * cor / r2;
      if (k.k(b)) out.y[b] += base * std::abs(k.k(b)) * cor;
    }
    for (int t = 0; t < k.nv(); ++t) {
      int id = k.var(t);
      if (t > 0 && k.var(t - 1) == id) continue;
      int m = id >> 1;
      int mult = k.count(id);
      real val = base * mult * cor / cr[m];
      if (id & 1)
        out.z[m] += val;  // d/dzbar feeds the z component
      else
        out.zbar[m] += val;
    }
  }
  return combine_sums(out, S, w);
}

cplx evaluate(const FormalSeries& H, const PhasePoint& v) {
  const SiteSet& S = H.sites();
  const cplx I(0.0, 1.0);
  cplx acc = 0;
  for (auto& [k, c] : H.terms()) {
    cplx phase = 0;
    for (int b = 0; b < S.n(); ++b) phase += static_cast<long double>(k.k(b)) * v.x[b];
    cplx t = c * std::exp(I * phase);
    for (int b = 0; b < S.n(); ++b)
      for (int e = 0; e < k.i(b); ++e) t *= v.y[b];
    for (int u = 0; u < k.nv(); ++u) {
      int id = k.var(u);
      t *= (id & 1) ? v.zbar[id >> 1] : v.z[id >> 1];
    }
    acc += t;
  }
  return acc;
}

PhasePoint evaluate(const VectorField& X, const PhasePoint& v) {
  PhasePoint out;
  for (auto& f : X.x) out.x.push_back(evaluate(f, v));
  for (auto& f : X.y) out.y.push_back(evaluate(f, v));
  for (auto& f : X.z) out.z.push_back(evaluate(f, v));
  for (auto& f : X.zbar) out.zbar.push_back(evaluate(f, v));
  return out;
}

PhasePoint random_point_in_domain(const SiteSet& s, const NormWeights& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto phase = [&] { return std::polar(1.0, 2 * M_PI * U(rng)); };
  PhasePoint v = PhasePoint::zero(s);
  const double shrink = 1.0 - 1e-9;
  for (int b = 0; b < s.n(); ++b)
    v.x[b] = cplx(2 * M_PI * U(rng), w.s * shrink * (2 * U(rng) - 1));
  // y on the l^1 sphere of radius r^2 (scaled)
  std::vector<double> e(s.n());
  double tot = 0;
  for (auto& t : e) tot += (t = -std::log(1.0 - U(rng)));
  double ry = w.r * w.r * shrink * std::pow(U(rng), 0.25);
  for (int b = 0; b < s.n(); ++b) v.y[b] = ry * e[b] / tot * phase();
  // z, zbar independently on the weighted ball
  for (auto* fam : {&v.z, &v.zbar}) {
    std::vector<double> g(s.mode_count());
    double nrm = 0;
    bool single = U(rng) < 0.3;
    int pick = s.mode_count() ? static_cast<int>(U(rng) * s.mode_count()) : 0;
    for (int m = 0; m < s.mode_count(); ++m) {
      g[m] = single ? (m == pick ? 1.0 : 0.0) : -std::log(1.0 - U(rng));
      double wt = static_cast<double>(mode_weight(s.mode(m), w.a_exp, w.p));
      nrm += wt * wt * g[m] * g[m];
    }
    double rad = w.r * shrink * std::pow(U(rng), 0.25);
    nrm = std::sqrt(nrm);
    for (int m = 0; m < s.mode_count(); ++m)
      (*fam)[m] = nrm > 0 ? rad * g[m] / nrm * phase() : 0.0;
  }
  return v;
}

real sampled_sup_norm(const VectorField& X, const NormWeights& w, int samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  real best = 0;
  for (int t = 0; t < samples; ++t) {
    PhasePoint v = random_point_in_domain(*X.sites, w, rng);
    PhasePoint f = evaluate(X, v);
    best = std::max(best, weighted_phase_norm(f, *X.sites, w, w.q));
  }
  return best;
}

ParameterGrid ParameterGrid::box(const std::vector<double>& lo, const std::vector<double>& hi,
                                 const std::vector<int>& shape) {
  const size_t n = lo.size();
  if (hi.size() != n || shape.size() != n) throw std::invalid_argument("grid box dimension mismatch");
  ParameterGrid g;
  g.lo = lo;
  g.hi = hi;
  g.shape = shape;
  size_t total = 1;
  for (int s : shape) {
    if (s < 1) throw std::invalid_argument("grid shape must be positive");
    total *= s;
  }
  std::vector<int> idx(n, 0);
  for (size_t t = 0; t < total; ++t) {
    std::vector<double> p(n);
    size_t rem = t;
    for (size_t d = n; d-- > 0;) {
      idx[d] = static_cast<int>(rem % shape[d]);
      rem /= shape[d];
    }
    for (size_t d = 0; d < n; ++d) p[d] = lo[d] + (idx[d] + 0.5) * (hi[d] - lo[d]) / shape[d];
    g.points.push_back(p);
    size_t stride = 1;
    for (size_t d = n; d-- > 0;) {
      if (idx[d] + 1 < shape[d]) g.pairs.emplace_back(static_cast<int>(t), static_cast<int>(t + stride));
      stride *= shape[d];
    }
  }
  std::sort(g.pairs.begin(), g.pairs.end());
  g.diameter = distance(lo, hi);
  return g;
}

double ParameterGrid::cell_volume() const {
  double v = 1;
  for (size_t d = 0; d < lo.size(); ++d) v *= (hi[d] - lo[d]) / shape[d];
  return v;
}

double ParameterGrid::box_volume() const {
  double v = 1;
  for (size_t d = 0; d < lo.size(); ++d) v *= hi[d] - lo[d];
  return v;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (size_t d = 0; d < a.size(); ++d) {
    long double t = static_cast<long double>(a[d]) - b[d];
    s += t * t;
  }
  return static_cast<double>(std::sqrt(s));
}

real lipschitz_seminorm(const std::vector<VectorField>& X, const ParameterGrid& grid,
                        const NormWeights& w, const std::vector<char>* active) {
  if (grid.pairs.empty()) throw std::invalid_argument("Lipschitz seminorm needs at least one pair");
  real best = 0;
  for (auto [a, b] : grid.pairs) {
    if (active && (!(*active)[a] || !(*active)[b])) continue;
    real d = distance(grid.points[a], grid.points[b]);
    best = std::max(best, majorant_norm(X[a] - X[b], w) / d);
  }
  return best;
}

real lipschitz_seminorm_hamiltonian(const std::vector<FormalSeries>& H, const ParameterGrid& grid,
                                    const NormWeights& w, const std::vector<char>* active) {
  if (grid.pairs.empty()) throw std::invalid_argument("Lipschitz seminorm needs at least one pair");
  real best = 0;
  for (auto [a, b] : grid.pairs) {
    if (active && (!(*active)[a] || !(*active)[b])) continue;
    real d = distance(grid.points[a], grid.points[b]);
    best = std::max(best, majorant_norm_hamiltonian(H[a] - H[b], w) / d);
  }
  return best;
}

}  // namespace dnlskam
