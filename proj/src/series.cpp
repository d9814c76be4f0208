#include "dnlskam/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace dnlskam {

void Key::set_k(int s, int v) {
  if (v < -127 || v > 127) throw IndexError("Fourier index out of packed range");
  b[s] = static_cast<uint8_t>(static_cast<int8_t>(v));
}

void Key::set_i(int s, int v) {
  if (v < 0 || v > 255) throw IndexError("action power out of packed range");
  b[6 + s] = static_cast<uint8_t>(v);
}

int Key::count(int id) const {
  int c = 0;
  for (int t = 0; t < nv(); ++t) c += (var(t) == id);
  return c;
}

int Key::degree() const { return 2 * iabs() + nv(); }

int Key::kabs() const {
  int s = 0;
  for (int t = 0; t < kMaxN; ++t) s += std::abs(k(t));
  return s;
}

int Key::iabs() const {
  int s = 0;
  for (int t = 0; t < kMaxN; ++t) s += i(t);
  return s;
}

void Key::add_var(int id) {
  int n = nv();
  if (n >= kMaxVars) throw IndexError("monomial degree exceeds packed key capacity");
  int pos = n;
  while (pos > 0 && var(pos - 1) > id) {
    b[13 + pos] = b[13 + pos - 1];
    --pos;
  }
  b[13 + pos] = static_cast<uint8_t>(id);
  b[12] = static_cast<uint8_t>(n + 1);
}

bool Key::remove_var(int id) {
  int n = nv();
  for (int t = 0; t < n; ++t) {
    if (var(t) == id) {
      for (int u = t; u + 1 < n; ++u) b[13 + u] = b[13 + u + 1];
      b[13 + n - 1] = 0;
      b[12] = static_cast<uint8_t>(n - 1);
      return true;
    }
  }
  return false;
}

Key key_product(const Key& a, const Key& c) {
  Key r;
  for (int s = 0; s < kMaxN; ++s) {
    r.set_k(s, a.k(s) + c.k(s));
    r.set_i(s, a.i(s) + c.i(s));
  }
  int na = a.nv(), nc = c.nv();
  if (na + nc > kMaxVars) throw IndexError("monomial degree exceeds packed key capacity");
  int p = 0, q = 0, t = 0;
  while (p < na || q < nc) {
    if (q >= nc || (p < na && a.var(p) <= c.var(q)))
      r.b[13 + t++] = static_cast<uint8_t>(a.var(p++));
    else
      r.b[13 + t++] = static_cast<uint8_t>(c.var(q++));
  }
  r.b[12] = static_cast<uint8_t>(t);
  return r;
}

cplx FormalSeries::coeff(const Key& key) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                             [](const Term& t, const Key& k) { return t.first < k; });
  if (it != terms_.end() && it->first == key) return it->second;
  return 0.0;
}

FormalSeries FormalSeries::with_budget(TruncationBudget b) const {
  FormalSeries r(sites_, b);
  for (auto& t : terms_)
    if (b.admits(t.first)) r.terms_.push_back(t);
  r.pruned_mass_ = pruned_mass_;
  return r;
}

FormalSeries FormalSeries::from_terms(SitePtr s, TruncationBudget budget, std::vector<Term> terms,
                                      long double prune) {
  FormalSeries r(std::move(s), budget);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  for (auto& t : terms) {
    if (!budget.admits(t.first)) continue;
    if (!r.terms_.empty() && r.terms_.back().first == t.first)
      r.terms_.back().second += t.second;
    else
      r.terms_.push_back(t);
  }
  std::vector<Term> kept;
  kept.reserve(r.terms_.size());
  for (auto& t : r.terms_) {
    long double m = std::abs(t.second);
    if (m <= prune)
      r.pruned_mass_ += m;
    else
      kept.push_back(t);
  }
  r.terms_ = std::move(kept);
  return r;
}

void Accum::add_series(const FormalSeries& s, cplx scale) {
  for (auto& [k, c] : s.terms()) add(k, scale * c);
}

FormalSeries Accum::finish(long double prune) const {
  std::vector<FormalSeries::Term> v(map_.begin(), map_.end());
  return FormalSeries::from_terms(sites_, budget_, std::move(v), prune);
}

namespace {

void require_same_sites(const FormalSeries& a, const FormalSeries& b) {
  if (!a.site_ptr() || !b.site_ptr()) return;
  if (a.site_ptr() != b.site_ptr() && !(a.sites() == b.sites()))
    throw IndexError("series defined over different site sets");
}

SitePtr pick_sites(const FormalSeries& a, const FormalSeries& b) {
  return a.site_ptr() ? a.site_ptr() : b.site_ptr();
}

// merge of two sorted term lists
FormalSeries merge(const FormalSeries& a, const FormalSeries& b, cplx sb) {
  require_same_sites(a, b);
  FormalSeries r(pick_sites(a, b), a.site_ptr() ? a.budget() : b.budget());
  auto& out = r.mutable_terms();
  auto& ta = a.terms();
  auto& tb = b.terms();
  size_t p = 0, q = 0;
  while (p < ta.size() || q < tb.size()) {
    if (q >= tb.size() || (p < ta.size() && ta[p].first < tb[q].first)) {
      out.push_back(ta[p++]);
    } else if (p >= ta.size() || tb[q].first < ta[p].first) {
      out.emplace_back(tb[q].first, sb * tb[q].second);
      ++q;
    } else {
      cplx c = ta[p].second + sb * tb[q].second;
      if (std::abs(c) > FormalSeries::kPrune)
        out.emplace_back(ta[p].first, c);
      else
        r.add_pruned(std::abs(c));
      ++p;
      ++q;
    }
  }
  r.add_pruned(a.pruned_mass() + b.pruned_mass());
  return r;
}

}  // namespace

FormalSeries operator+(const FormalSeries& a, const FormalSeries& b) { return merge(a, b, 1.0); }
FormalSeries operator-(const FormalSeries& a, const FormalSeries& b) { return merge(a, b, -1.0); }

FormalSeries operator*(cplx c, const FormalSeries& a) {
  FormalSeries r(a.site_ptr(), a.budget());
  if (c == cplx(0.0)) return r;
  for (auto& [k, v] : a.terms()) r.mutable_terms().emplace_back(k, c * v);
  return r;
}

FormalSeries product(const FormalSeries& a, const FormalSeries& b, const TruncationBudget& budget) {
  require_same_sites(a, b);
  Accum acc(pick_sites(a, b), budget);
  for (auto& [ka, ca] : a.terms())
    for (auto& [kb, cb] : b.terms()) {
      if (ka.degree() + kb.degree() > budget.degree_max) continue;
      acc.add(key_product(ka, kb), ca * cb);
    }
  return acc.finish();
}

long double max_abs_coeff(const FormalSeries& a) {
  long double m = 0;
  for (auto& t : a.terms()) m = std::max(m, std::abs(t.second));
  return m;
}

long double max_abs_diff(const FormalSeries& a, const FormalSeries& b) {
  return max_abs_coeff(a - b);
}

namespace {
// total order on series so that {H,F} and {F,H} visit term pairs identically
bool canonical_less(const FormalSeries& a, const FormalSeries& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t t = 0; t < a.size(); ++t) {
    const auto& x = a.terms()[t];
    const auto& y = b.terms()[t];
    if (!(x.first == y.first)) return x.first < y.first;
    if (x.second.real() != y.second.real()) return x.second.real() < y.second.real();
    if (x.second.imag() != y.second.imag()) return x.second.imag() < y.second.imag();
  }
  return false;
}

FormalSeries bracket_ordered(const FormalSeries& H, const FormalSeries& F,
                             const TruncationBudget& budget, Coordinates coords);
}  // namespace

FormalSeries poisson_bracket(const FormalSeries& H, const FormalSeries& F,
                             const TruncationBudget& budget, Coordinates coords) {
  require_same_sites(H, F);
  if (canonical_less(F, H)) return -1.0 * bracket_ordered(F, H, budget, coords);
  return bracket_ordered(H, F, budget, coords);
}

namespace {
FormalSeries bracket_ordered(const FormalSeries& H, const FormalSeries& F,
                             const TruncationBudget& budget, Coordinates coords) {
  SitePtr sp = pick_sites(H, F);
  if (!sp) return FormalSeries();
  const SiteSet& S = *sp;
  if (coords == Coordinates::fourier && S.n() != 0)
    throw IndexError("Fourier-coordinate bracket needs an empty site set");
  const int n = S.n();
  std::vector<int> sig_site(n), sig_mode(S.mode_count());
  for (int b = 0; b < n; ++b) sig_site[b] = sign(S.site(b));
  for (int m = 0; m < S.mode_count(); ++m) sig_mode[m] = sign(S.mode(m));

  // bucket F by degree so hopeless pairs are skipped
  int maxdeg = 0;
  for (auto& t : F.terms()) maxdeg = std::max(maxdeg, t.first.degree());
  std::vector<std::vector<const FormalSeries::Term*>> byDeg(maxdeg + 1);
  for (auto& t : F.terms()) byDeg[t.first.degree()].push_back(&t);

  const cplx I(0.0, 1.0);
  Accum acc(sp, budget);
  for (auto& [kh, ch] : H.terms()) {
    const int dh = kh.degree();
    const int dlim = std::min(maxdeg, budget.degree_max + 2 - dh);
    for (int df = 0; df <= dlim; ++df) {
      for (const auto* tf : byDeg[df]) {
        const Key& kf = tf->first;
        const cplx cf = tf->second;
        int kab = 0;
        for (int b = 0; b < n; ++b) kab += std::abs(kh.k(b) + kf.k(b));
        if (kab > budget.fourier_max) continue;
        bool any = false;
        Key base;
        // x-y part
        for (int b = 0; b < n; ++b) {
          long w = static_cast<long>(kh.k(b)) * kf.i(b) - static_cast<long>(kh.i(b)) * kf.k(b);
          if (w == 0) continue;
          if (!any) {
            base = key_product(kh, kf);
            any = true;
          }
          Key r = base;
          r.set_i(b, r.i(b) - 1);
          acc.add(r, I * (static_cast<long double>(sig_site[b] * w) * (ch * cf)));
        }
        // z-zbar part
        const int nh = kh.nv();
        for (int t = 0; t < nh; ++t) {
          int id = kh.var(t);
          if (t > 0 && (kh.var(t - 1) >> 1) == (id >> 1)) continue;  // mode done
          int m = id >> 1;
          int a1 = kh.count(zid(m)), b1 = kh.count(zbid(m));
          int a2 = kf.count(zid(m)), b2 = kf.count(zbid(m));
          long w = static_cast<long>(a1) * b2 - static_cast<long>(b1) * a2;
          if (w == 0) continue;
          if (!any) {
            base = key_product(kh, kf);
            any = true;
          }
          Key r = base;
          r.remove_var(zid(m));
          r.remove_var(zbid(m));
          acc.add(r, I * (static_cast<long double>(-sig_mode[m] * w) * (ch * cf)));
        }
      }
    }
  }
  return acc.finish();
}
}  // namespace

FormalSeries d_x(const FormalSeries& H, int b) {
  FormalSeries r(H.site_ptr(), H.budget());
  for (auto& [k, c] : H.terms())
    if (k.k(b) != 0) r.mutable_terms().emplace_back(k, cplx(0.0, k.k(b)) * c);
  return r;
}

FormalSeries d_y(const FormalSeries& H, int b) {
  std::vector<FormalSeries::Term> v;
  for (auto& [k, c] : H.terms()) {
    if (k.i(b) == 0) continue;
    Key r = k;
    r.set_i(b, k.i(b) - 1);
    v.emplace_back(r, static_cast<long double>(k.i(b)) * c);
  }
  return FormalSeries::from_terms(H.site_ptr(), H.budget(), std::move(v));
}

namespace {
FormalSeries d_var(const FormalSeries& H, int id) {
  std::vector<FormalSeries::Term> v;
  for (auto& [k, c] : H.terms()) {
    int m = k.count(id);
    if (m == 0) continue;
    Key r = k;
    r.remove_var(id);
    v.emplace_back(r, static_cast<long double>(m) * c);
  }
  return FormalSeries::from_terms(H.site_ptr(), H.budget(), std::move(v));
}
}  // namespace

FormalSeries d_z(const FormalSeries& H, int mode_id) { return d_var(H, zid(mode_id)); }
FormalSeries d_zbar(const FormalSeries& H, int mode_id) { return d_var(H, zbid(mode_id)); }

int default_lie_order(const FormalSeries& H, const FormalSeries& F, const TruncationBudget& budget) {
  if (F.empty() || H.empty()) return 0;
  int dF = 1 << 20, dH = 1 << 20;
  for (auto& t : F.terms()) dF = std::min(dF, t.first.degree());
  for (auto& t : H.terms()) dH = std::min(dH, t.first.degree());
  if (dF >= 3) return std::max(0, (budget.degree_max - dH) / (dF - 2));
  return 16;
}

LieResult lie_transform(const FormalSeries& H, const FormalSeries& F, int order_max,
                        const TruncationBudget& budget) {
  LieResult res;
  Coordinates coords = (H.site_ptr() && H.sites().n() == 0) ? Coordinates::fourier
                                                             : Coordinates::action_angle;
  const bool fixed = order_max > 0;
  int order = fixed ? order_max : default_lie_order(H, F, budget);
  FormalSeries sum = H.with_budget(budget);
  FormalSeries term = sum;
  long double prev = max_abs_coeff(term);
  const long double scale0 = prev;
  for (int m = 1; m <= order; ++m) {
    term = (1.0 / m) * poisson_bracket(term, F, budget, coords);
    if (term.empty()) break;
    sum = sum + term;
    res.orders = m;
    long double cur = max_abs_coeff(term);
    res.last_ratio = prev > 0 ? static_cast<double>(cur / prev) : 0.0;
    prev = cur;
    if (!fixed && cur < 1e-20 * scale0) break;
  }
  res.nonconvergent = res.orders > 0 && res.last_ratio > 1.0 && !term.empty();
  res.value = std::move(sum);
  return res;
}

bool in_taylor_R(const Key& key) { return key.degree() <= 2; }

bool in_normal_part(const Key& key) {
  if (key.kabs() != 0) return false;
  const int d = key.degree();
  if (d == 0) return true;
  if (key.iabs() == 1 && key.nv() == 0) return true;
  if (key.iabs() == 0 && key.nv() == 2) return (key.var(0) >> 1) == (key.var(1) >> 1) &&
                                               key.var(0) != key.var(1);
  return false;
}

TaylorSplit taylor_truncate_R(const FormalSeries& P) {
  TaylorSplit out{FormalSeries(P.site_ptr(), P.budget()), FormalSeries(P.site_ptr(), P.budget())};
  for (auto& t : P.terms()) {
    if (!in_taylor_R(t.first)) continue;
    out.R.mutable_terms().push_back(t);
    if (in_normal_part(t.first)) out.normal.mutable_terms().push_back(t);
  }
  return out;
}

long key_momentum(const Key& key, const SiteSet& s) {
  long p = 0;
  for (int b = 0; b < s.n(); ++b) p += static_cast<long>(key.k(b)) * s.site(b);
  for (int t = 0; t < key.nv(); ++t) {
    int id = key.var(t);
    int j = s.mode(id >> 1);
    p += (id & 1) ? -j : j;
  }
  return p;
}

bool check_momentum_conservation(const FormalSeries& H) {
  for (auto& t : H.terms())
    if (key_momentum(t.first, H.sites()) != 0) return false;
  return true;
}

MultiIndex to_multi(const Key& key, const SiteSet& s) {
  MultiIndex m;
  for (int b = 0; b < s.n(); ++b) {
    m.k.push_back(key.k(b));
    m.i.push_back(key.i(b));
  }
  for (int t = 0; t < key.nv(); ++t) {
    int id = key.var(t);
    int j = s.mode(id >> 1);
    if (id & 1)
      m.beta[j] += 1;
    else
      m.alpha[j] += 1;
  }
  return m;
}

Key make_key(const SiteSet& s, std::vector<int> k, std::vector<int> i,
             const std::map<int, int>& alpha, const std::map<int, int>& beta) {
  if (static_cast<int>(k.size()) > s.n() || static_cast<int>(i.size()) > s.n())
    throw IndexError("multi-index longer than the site count");
  if (s.n() > kMaxN) throw IndexError("too many sites for packed keys");
  Key key;
  for (size_t b = 0; b < k.size(); ++b) key.set_k(static_cast<int>(b), k[b]);
  for (size_t b = 0; b < i.size(); ++b) key.set_i(static_cast<int>(b), i[b]);
  for (auto& [j, p] : alpha) {
    int id = s.mode_id(j);
    if (id < 0) throw IndexError("alpha mode " + std::to_string(j) + " not in Z_*");
    for (int t = 0; t < p; ++t) key.add_var(zid(id));
  }
  for (auto& [j, p] : beta) {
    int id = s.mode_id(j);
    if (id < 0) throw IndexError("beta mode " + std::to_string(j) + " not in Z_*");
    for (int t = 0; t < p; ++t) key.add_var(zbid(id));
  }
  return key;
}

Key to_key(const MultiIndex& m, const SiteSet& s) { return make_key(s, m.k, m.i, m.alpha, m.beta); }

VectorField VectorField::zero(SitePtr s, TruncationBudget b) {
  VectorField v;
  v.sites = s;
  v.budget = b;
  FormalSeries z0(s, b);
  v.x.assign(s->n(), z0);
  v.y.assign(s->n(), z0);
  v.z.assign(s->mode_count(), z0);
  v.zbar.assign(s->mode_count(), z0);
  return v;
}

bool VectorField::is_zero() const {
  for (auto* fam : {&x, &y, &z, &zbar})
    for (auto& c : *fam)
      if (!c.empty()) return false;
  return true;
}

VectorField hamiltonian_vector_field(const FormalSeries& H) {
  VectorField v = VectorField::zero(H.site_ptr(), H.budget());
  const SiteSet& S = H.sites();
  const cplx I(0.0, 1.0);
  for (int b = 0; b < S.n(); ++b) {
    double sg = sign(S.site(b));
    v.x[b] = sg * d_y(H, b);
    v.y[b] = -sg * d_x(H, b);
  }
  for (int m = 0; m < S.mode_count(); ++m) {
    double sg = sign(S.mode(m));
    v.z[m] = (-I * static_cast<long double>(sg)) * d_zbar(H, m);
    v.zbar[m] = (I * static_cast<long double>(sg)) * d_z(H, m);
  }
  return v;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  for (size_t t = 0; t < r.x.size(); ++t) r.x[t] = a.x[t] - b.x[t];
  for (size_t t = 0; t < r.y.size(); ++t) r.y[t] = a.y[t] - b.y[t];
  for (size_t t = 0; t < r.z.size(); ++t) r.z[t] = a.z[t] - b.z[t];
  for (size_t t = 0; t < r.zbar.size(); ++t) r.zbar[t] = a.zbar[t] - b.zbar[t];
  return r;
}

VectorField scale(const VectorField& a, cplx c) {
  VectorField r = a;
  for (auto* fam : {&r.x, &r.y, &r.z, &r.zbar})
    for (auto& s : *fam) s = c * s;
  return r;
}

namespace {
// dW[V] for one component W
FormalSeries directional(const FormalSeries& W, const VectorField& V, const TruncationBudget& b) {
  Accum acc(V.sites, b);
  const SiteSet& S = *V.sites;
  auto push = [&](const FormalSeries& dW, const FormalSeries& v) {
    if (dW.empty() || v.empty()) return;
    acc.add_series(product(dW, v, b));
  };
  for (int t = 0; t < S.n(); ++t) {
    push(d_x(W, t), V.x[t]);
    push(d_y(W, t), V.y[t]);
  }
  for (int m = 0; m < S.mode_count(); ++m) {
    push(d_z(W, m), V.z[m]);
    push(d_zbar(W, m), V.zbar[m]);
  }
  return acc.finish();
}
}  // namespace

VectorField commutator(const VectorField& X, const VectorField& Y, const TruncationBudget& budget) {
  VectorField out = VectorField::zero(X.sites, budget);
  auto one = [&](const FormalSeries& a, const FormalSeries& c) {
    return directional(a, Y, budget) - directional(c, X, budget);
  };
  for (size_t t = 0; t < out.x.size(); ++t) out.x[t] = one(X.x[t], Y.x[t]);
  for (size_t t = 0; t < out.y.size(); ++t) out.y[t] = one(X.y[t], Y.y[t]);
  for (size_t t = 0; t < out.z.size(); ++t) out.z[t] = one(X.z[t], Y.z[t]);
  for (size_t t = 0; t < out.zbar.size(); ++t) out.zbar[t] = one(X.zbar[t], Y.zbar[t]);
  return out;
}

// ---- serialization ----

namespace {

std::string fmt17(long double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v, const char* sep) {
  std::string s;
  for (size_t t = 0; t < v.size(); ++t) {
    if (t) s += sep;
    s += std::to_string(v[t]);
  }
  return s;
}

std::string pairs(const std::map<int, int>& m) {
  if (m.empty()) return "-";
  std::string s;
  for (auto& [j, p] : m) {
    if (!s.empty()) s += ' ';
    s += std::to_string(j) + ":" + std::to_string(p);
  }
  return s;
}

std::vector<int> parse_ints(const std::string& field) {
  std::vector<int> v;
  std::istringstream is(field);
  std::string tok;
  while (is >> tok)
    if (tok != "-") v.push_back(std::stoi(tok));
  return v;
}

std::map<int, int> parse_pairs(const std::string& field) {
  std::map<int, int> m;
  std::istringstream is(field);
  std::string tok;
  while (is >> tok) {
    if (tok == "-") continue;
    auto c = tok.find(':');
    if (c == std::string::npos) throw IndexError("bad mode pair '" + tok + "'");
    m[std::stoi(tok.substr(0, c))] += std::stoi(tok.substr(c + 1));
  }
  return m;
}

std::vector<std::string> split_bar(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t p = line.find('|', start);
    out.push_back(line.substr(start, p == std::string::npos ? std::string::npos : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

void write_text(std::ostream& os, const FormalSeries& s) {
  const SiteSet& S = s.sites();
  os << "# dnlskam-series 1 sites=" << (S.n() ? join_ints(S.sites(), ",") : "-")
     << " cutoff=" << S.mode_cutoff() << " degree_max=" << s.budget().degree_max
     << " fourier_max=" << s.budget().fourier_max << " terms=" << s.size() << "\n";
  for (auto& [k, c] : s.terms()) {
    MultiIndex m = to_multi(k, S);
    os << (m.k.empty() ? "-" : join_ints(m.k, " ")) << " | "
       << (m.i.empty() ? "-" : join_ints(m.i, " ")) << " | " << pairs(m.alpha) << " | "
       << pairs(m.beta) << " | " << fmt17(c.real()) << " " << fmt17(c.imag()) << "\n";
  }
}

FormalSeries read_text(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# dnlskam-series 1", 0) != 0)
    throw IndexError("not a dnlskam series text dump");
  std::vector<int> sites;
  int cutoff = 0;
  TruncationBudget b;
  std::istringstream hs(header.substr(18));
  std::string tok;
  size_t expect = 0;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "sites") {
      if (val != "-") {
        std::replace(val.begin(), val.end(), ',', ' ');
        sites = parse_ints(val);
      }
    } else if (key == "cutoff") {
      cutoff = std::stoi(val);
    } else if (key == "degree_max") {
      b.degree_max = std::stoi(val);
    } else if (key == "fourier_max") {
      b.fourier_max = std::stoi(val);
    } else if (key == "terms") {
      expect = std::stoul(val);
    }
  }
  b.mode_cutoff = cutoff;
  auto sp = std::make_shared<const SiteSet>(sites, cutoff);
  std::vector<FormalSeries::Term> terms;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_bar(line);
    if (f.size() != 5) throw IndexError("series line needs 5 fields: " + line);
    auto k = parse_ints(f[0]);
    auto i = parse_ints(f[1]);
    std::istringstream cs(f[4]);
    std::string re, im;
    cs >> re >> im;
    cplx c(std::strtold(re.c_str(), nullptr), std::strtold(im.c_str(), nullptr));
    terms.emplace_back(make_key(*sp, k, i, parse_pairs(f[2]), parse_pairs(f[3])), c);
  }
  if (terms.size() != expect) throw IndexError("series dump term count mismatch");
  FormalSeries r(sp, b);
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  r.mutable_terms() = std::move(terms);
  return r;
}

namespace {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IndexError("truncated binary dump");
  return v;
}
// x87 extended: 10 significant bytes, the rest is padding
void put_ld(std::ostream& os, long double v) {
  unsigned char buf[sizeof(long double)] = {};
  std::memcpy(buf, &v, sizeof v);
  os.write(reinterpret_cast<const char*>(buf), 10);
}
long double get_ld(std::istream& is) {
  unsigned char buf[sizeof(long double)] = {};
  if (!is.read(reinterpret_cast<char*>(buf), 10)) throw IndexError("truncated binary dump");
  long double v;
  std::memcpy(&v, buf, sizeof v);
  return v;
}
}  // namespace

void write_binary(std::ostream& os, const FormalSeries& s) {
  os.write("DKSB", 4);
  put<uint32_t>(os, 2);
  const SiteSet& S = s.sites();
  put<int32_t>(os, S.n());
  for (int j : S.sites()) put<int32_t>(os, j);
  put<int32_t>(os, S.mode_cutoff());
  put<int32_t>(os, s.budget().degree_max);
  put<int32_t>(os, s.budget().fourier_max);
  put<double>(os, s.pruned_mass());
  put<uint64_t>(os, s.size());
  for (auto& [k, c] : s.terms()) {
    os.write(reinterpret_cast<const char*>(k.b.data()), 32);
    put_ld(os, c.real());
    put_ld(os, c.imag());
  }
}

FormalSeries read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "DKSB") throw IndexError("bad binary magic");
  if (get<uint32_t>(is) != 2) throw IndexError("unsupported binary dump version");
  int n = get<int32_t>(is);
  std::vector<int> sites(n);
  for (auto& j : sites) j = get<int32_t>(is);
  int cutoff = get<int32_t>(is);
  TruncationBudget b;
  b.degree_max = get<int32_t>(is);
  b.fourier_max = get<int32_t>(is);
  b.mode_cutoff = cutoff;
  double pruned = get<double>(is);
  uint64_t count = get<uint64_t>(is);
  auto sp = std::make_shared<const SiteSet>(sites, cutoff);
  FormalSeries r(sp, b);
  r.add_pruned(pruned);
  auto& v = r.mutable_terms();
  v.reserve(count);
  for (uint64_t t = 0; t < count; ++t) {
    Key k;
    if (!is.read(reinterpret_cast<char*>(k.b.data()), 32)) throw IndexError("truncated binary dump");
    long double re = get_ld(is);
    long double im = get_ld(is);
    v.emplace_back(k, cplx(re, im));
  }
  return r;
}

}  // namespace dnlskam
