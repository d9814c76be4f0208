#include "dnlskam/kam.hpp"

#include <climits>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace dnlskam {

namespace {

std::string num(real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  std::string s(buf);
  if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan") return "null";
  return s;
}

int clamp_int(real v) { return v >= static_cast<real>(INT_MAX / 2) ? INT_MAX / 2 : static_cast<int>(v); }

bool is_constant(const Key& k) { return k.kabs() == 0 && k.degree() == 0; }

FormalSeries drop_constant(const FormalSeries& H) {
  FormalSeries out(H.site_ptr(), H.budget());
  for (auto& t : H.terms())
    if (!is_constant(t.first)) out.mutable_terms().push_back(t);
  return out;
}

NormWeights weights(const KamConfig& cfg, double s, real r, double a_mom) {
  NormWeights w;
  w.s = s;
  w.r = r;
  w.p = cfg.p;
  w.q = cfg.q;
  w.a_exp = cfg.a;
  w.a_mom = a_mom;
  return w;
}

FrequencyData freq_data(const KamState& st, const KamConfig& cfg) {
  FrequencyData fd;
  fd.sites = st.sites;
  fd.grid = st.grid;
  fd.at = st.freq;
  fd.M1 = cfg.globals.M10;
  fd.M2 = cfg.globals.M20;
  return fd;
}

// sum_{m>=0} ad_F^m G * w(m) until the terms vanish
FormalSeries weighted_lie_sum(const FormalSeries& G, const FormalSeries& F, const TruncationBudget& b,
                              int order_max, double (*w)(int), int* orders) {
  Accum acc(G.site_ptr(), b);
  FormalSeries term = G;
  long double top = max_abs_coeff(G);
  int m = 0;
  for (; m <= order_max && !term.empty(); ++m) {
    acc.add_series(term, w(m));
    long double mc = max_abs_coeff(term) * w(m);
    if (m > 0 && mc <= 1e-22 * top) break;
    if (m < order_max) term = poisson_bracket(term, F, b);
  }
  if (orders) *orders = std::max(*orders, m);
  return acc.finish();
}

double fact(int m) {
  double f = 1;
  for (int t = 2; t <= m; ++t) f *= t;
  return f;
}
double w_exp(int m) { return 1.0 / fact(m); }
double w_A(int m) { return 1.0 / fact(m + 2); }
double w_R(int m) { return 1.0 / (fact(m) * (m + 2)); }

}  // namespace

double KamGlobals::beta_prime() const { return 0.5 * std::min(beta / (1 + beta), 0.25); }
double KamGlobals::kappa() const { return 4.0 / 3.0 - beta_prime() / 3.0; }
double KamGlobals::gamma0_value() const {
  if (gamma0 > 0) return gamma0;
  return beta_prime() / (800.0 * std::max(C00(), static_cast<double>(C_J)));
}

void KamGlobals::validate() const {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (tau < n + 3) throw std::invalid_argument("tau must satisfy tau >= n + 3");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  if (!(s0 > 0 && s0 < 1)) throw std::invalid_argument("s0 must lie in (0,1)");
  if (!(alpha0 > 0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(c > 0)) throw std::invalid_argument("c must be positive");
  if (gamma0 < 0 || gamma0 > 0.25) throw std::invalid_argument("gamma0 must lie in [0, 1/4]");
  if (!(m0 > 0 && E0 > 0 && M10 > 0 && M20 > 0 && M30 > 0))
    throw std::invalid_argument("frequency constants must be positive");
}

KamSchedule schedule(int nu, const KamGlobals& g, real eps, real r) {
  if (!(eps > 0) || !(eps < 1)) throw std::domain_error("schedule needs 0 < eps < 1");
  const real half = std::pow(2.0L, -nu);
  const real bp = g.beta_prime(), kap = g.kappa();
  KamSchedule row;
  row.nu = nu;
  row.m = g.m0 / 10 * (9 + half);
  row.E = g.E0 / 9 * (10 - half);
  row.M1 = g.M10 / 9 * (10 - half);
  row.M2 = g.M20 / 9 * (10 - half);
  row.M = row.M1 + row.M2;
  row.M3 = g.M30 / 10 * (9 + half);
  row.J = nu == 0 ? 0.0L
                  : std::pow(static_cast<real>(g.gamma0_value()),
                             -std::pow(kap, static_cast<real>(nu - 1)) / (g.tau + 1));
  row.s = g.s0 * half;
  row.sigma = row.s / 20;
  row.a = row.sigma / g.C_J;
  row.B = g.c * std::pow(static_cast<real>(row.sigma), -static_cast<real>(g.B_exponent()));
  row.eps = eps;
  const real le = std::fabs(std::log(eps));
  row.K = 5 * le / (4 * row.sigma);
  row.Pi = 5 * le / (2 * row.a);
  row.alpha1 = g.alpha0 / 10 * (9 + half);
  row.alpha2 = g.alpha0 * half / row.Pi;
  row.lambda = (nu == 0 ? static_cast<real>(g.alpha0) : row.alpha2) / row.M;
  row.eta = std::cbrt(std::pow(eps, 1 - bp) * row.B / row.alpha2) / 2;
  row.r = r;
  row.r_next = row.eta * r;
  row.eps_next = std::cbrt(row.B / row.alpha2) * std::pow(eps, kap);
  return row;
}

std::vector<KamSchedule> schedule_table(const KamGlobals& g, real eps0, real r0, int steps) {
  std::vector<KamSchedule> out;
  real e = eps0, r = r0;
  for (int nu = 0; nu < steps; ++nu) {
    out.push_back(schedule(nu, g, e, r));
    e = out.back().eps_next;
    r = out.back().r_next;
  }
  return out;
}

DnlsConfig KamConfig::dnls_resolved() const {
  DnlsConfig d = dnls;
  if (d.N <= 0)
    for (int j : J) d.N = std::max(d.N, std::abs(j));
  return d;
}

void KamConfig::validate() const {
  globals.validate();
  dnls_resolved().validate();
  if (static_cast<int>(J.size()) != globals.n) throw std::invalid_argument("globals.n differs from |J|");
  if (std::abs(p - q - 1) > 1e-15) throw std::invalid_argument("p - q must equal 1");
  if (!(r > 0 && r < 1)) throw std::invalid_argument("r must lie in (0,1)");
  if (a < 0 || a >= 1) throw std::invalid_argument("a must lie in [0,1)");
  if (degree_max < 2) throw std::invalid_argument("degree_max must be at least 2");
  if (fourier_max < 1) throw std::invalid_argument("fourier_max must be positive");
  if (per_axis < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be nonnegative");
  if (ranges.k_max < 1) throw std::invalid_argument("empty k-range");
}

double KamStepReport::contraction_ratio() const {
  if (!(eps_measured > 0) || !(eps_next_measured > 0)) return 0.0;
  return static_cast<double>(std::log(eps_next_measured) / std::log(eps_measured));
}

InitialData initial_state(const KamConfig& cfg) {
  cfg.validate();
  if (admissible(cfg.J) != Verdict::admissible)
    throw IndexError("site set is not admissible: " + to_string(admissible(cfg.J)));
  InitialData init;
  KamState& st = init.state;
  const int jmax = cfg.dnls.mode_cutoff;
  st.sites = std::make_shared<const SiteSet>(cfg.J, jmax);
  st.budget = TruncationBudget{cfg.degree_max, cfg.fourier_max, jmax};

  auto split = build_dnls_hamiltonian(cfg.dnls_resolved());
  TruncationBudget qb{cfg.dnls.degree_max, cfg.fourier_max, jmax};
  auto nf = partial_birkhoff(split, qb);
  init.birkhoff_residual = nf.delta1_residual;

  st.grid = default_parameter_box(cfg.J, cfg.r, cfg.per_axis);
  auto fd = frequency_maps(st.sites, st.grid);
  st.freq = fd.at;
  st.active.assign(st.grid.size(), 1);
  st.ledger.grid = st.grid;
  st.ledger.cumulative.assign(st.grid.size(), 0);
  st.generators.assign(st.grid.size(), {});
  for (size_t p = 0; p < st.grid.size(); ++p) {
    auto red = action_angle_reduce(nf, st.sites, st.grid.points[p], cfg.r, cfg.globals.s0, st.budget);
    st.P.push_back(drop_constant(red.P));
  }
  st.r = cfg.r;
  const auto& g = cfg.globals;
  const double M0 = g.M10 + g.M20;
  st.eps = measure_eps(st, cfg, g.s0, st.r, g.s0 / 20 / g.C_J, g.alpha0 / M0);
  init.eps0 = st.eps;
  const real gamma = g.gamma0_value();
  init.gate_rhs = std::pow(static_cast<real>(g.alpha0) * gamma, 1 + static_cast<real>(g.beta));
  init.gate_ok = init.eps0 <= init.gate_rhs;
  return init;
}

real measure_eps(const KamState& st, const KamConfig& cfg, double s, real r, double a_mom, real lambda) {
  auto w = weights(cfg, s, r, a_mom);
  real sup = 0;
  for (size_t p = 0; p < st.P.size(); ++p)
    if (st.active[p]) sup = std::max(sup, majorant_norm_hamiltonian(st.P[p], w));
  real lip = 0;
  if (lambda > 0 && !st.grid.pairs.empty())
    lip = lipschitz_seminorm_hamiltonian(st.P, st.grid, w, &st.active);
  return sup + lambda * lip;
}

KamStepReport kam_step(KamState& st, const KamConfig& cfg) {
  const auto& g = cfg.globals;
  const SiteSet& S = *st.sites;
  KamStepReport rep;
  rep.nu = st.nu;
  rep.eps_measured = st.eps;
  const bool trivial = !(st.eps > 0);
  // a vanishing perturbation is a fixed point; the schedule row is still reported
  KamSchedule row = schedule(st.nu, g, trivial ? 0.5L : st.eps, st.r);
  rep.row = row;
  rep.eps_next_schedule = trivial ? 0.0L : row.eps_next;
  rep.drift_bound = row.B * st.eps;
  const int jmax = S.mode_cutoff();
  rep.horizon = row.K > cfg.fourier_max || row.Pi > jmax;

  const size_t G = st.grid.size();
  const size_t before = std::count(st.active.begin(), st.active.end(), 1);

  // resonance zones of this step
  if (!trivial) {
    EnumRanges rg = cfg.ranges;
    if (rg.mode_max <= 0) rg.mode_max = jmax;
    int Pi = static_cast<int>(std::min<real>(row.Pi, rg.mode_max));
    auto fd = freq_data(st, cfg);
    auto ex = exclude_step(fd, rg, st.nu, row.alpha1, static_cast<double>(row.alpha2), g.tau, Pi,
                           &st.active, st.nu == 0, nullptr, 0);
    rep.zones1 = static_cast<long>(ex.zones1);
    rep.zones2 = static_cast<long>(ex.zones2);
    for (size_t p = 0; p < G; ++p)
      if (ex.mask1[p] || ex.mask2[p]) st.active[p] = 0;
    st.ledger.add(std::move(ex));
  }

  StepConstants sc;
  sc.alpha1 = row.alpha1;
  sc.alpha2 = static_cast<double>(row.alpha2);
  sc.tau = g.tau;
  sc.K = clamp_int(row.K);
  sc.Pi = clamp_int(row.Pi);
  sc.C0 = 2 * row.E / row.m;

  std::vector<real> d_om(G, 0.0), d_Om(G, 0.0);
  std::vector<std::vector<real>> dom_vec(G), dOm_vec(G);
  const bool check_mom = cfg.dnls.quintic.empty();
  for (size_t p = 0; p < G; ++p) {
    if (!st.active[p]) continue;
    auto split = taylor_truncate_R(st.P[p]);
    auto dr = dispatch_and_solve_all(split.R, st.freq[p], sc);
    for (int t = 0; t < 9; ++t) rep.block_counts[t] += dr.counts[t];
    if (dr.excluded()) {
      rep.floor_events += static_cast<long>(dr.events.size());
      st.active[p] = 0;
      continue;
    }
    rep.F_terms += static_cast<long>(dr.F.size());
    rep.R_hat_terms += static_cast<long>(dr.R_hat.size());

    // normal-form update
    Frequencies& f = st.freq[p];
    dom_vec[p].assign(S.n(), 0.0);
    dOm_vec[p].assign(S.mode_count(), 0.0);
    for (auto& [key, c] : dr.N_hat.terms()) {
      if (key.degree() == 0) continue;
      rep.imag_drift = std::max(rep.imag_drift, static_cast<double>(std::abs(c.imag())));
      if (key.nv() == 0) {
        for (int b = 0; b < S.n(); ++b)
          if (key.i(b)) {
            real v = sign(S.site(b)) * c.real();
            f.om_small[b] += static_cast<double>(v);
            dom_vec[p][b] += v;
          }
      } else {
        int m = key.var(0) >> 1;
        real v = sign(S.mode(m)) * c.real();
        f.Om_small[m] += static_cast<double>(v);
        dOm_vec[p][m] += v;
      }
    }
    for (real v : dom_vec[p]) d_om[p] = std::max(d_om[p], std::abs(v));
    for (int m = 0; m < S.mode_count(); ++m)
      d_Om[p] = std::max(d_Om[p], std::abs(dOm_vec[p][m]) / std::abs(S.mode(m)));

    // P_+ = R_hat + (P-R) o Phi + sum ad^m{A,F}/(m+2)! + ad^m{R,F}/(m!(m+2)),  A = N_hat + R_hat
    const int omax = cfg.lie_order > 0 ? cfg.lie_order : 40;
    int orders = 0;
    FormalSeries PmR = st.P[p] - split.R;
    FormalSeries A = dr.N_hat + dr.R_hat;
    FormalSeries out = dr.R_hat;
    if (!dr.F.empty()) {
      out = out + weighted_lie_sum(PmR, dr.F, st.budget, omax, w_exp, &orders);
      if (!A.empty()) out = out + weighted_lie_sum(poisson_bracket(A, dr.F, st.budget), dr.F, st.budget, omax, w_A, &orders);
      out = out + weighted_lie_sum(poisson_bracket(split.R, dr.F, st.budget), dr.F, st.budget, omax, w_R, &orders);
    } else {
      out = out + PmR;
    }
    rep.lie_orders = std::max(rep.lie_orders, orders);
    st.P[p] = drop_constant(out);
    if (check_mom && !(check_momentum_conservation(dr.F) && check_momentum_conservation(st.P[p])))
      rep.momentum_ok = false;
    st.generators[p].push_back(dr.F);
  }
  for (size_t p = 0; p < G; ++p)
    if (!st.active[p]) st.P[p] = FormalSeries(st.sites, st.budget);

  // drifts with the Lipschitz part at weight lambda_nu
  real lo = 0, lO = 0;
  for (auto [a, b] : st.grid.pairs) {
    if (!st.active[a] || !st.active[b]) continue;
    real d = distance(st.grid.points[a], st.grid.points[b]);
    real x = 0, y = 0;
    for (int t = 0; t < S.n(); ++t) x = std::max(x, std::abs(dom_vec[a][t] - dom_vec[b][t]));
    for (int m = 0; m < S.mode_count(); ++m)
      y = std::max(y, std::abs(dOm_vec[a][m] - dOm_vec[b][m]) / std::abs(S.mode(m)));
    lo = std::max<real>(lo, x / d);
    lO = std::max<real>(lO, y / d);
  }
  real so = 0, sO = 0;
  for (size_t p = 0; p < G; ++p)
    if (st.active[p]) {
      so = std::max<real>(so, d_om[p]);
      sO = std::max<real>(sO, d_Om[p]);
    }
  rep.drift_omega = so + row.lambda * lo;
  rep.drift_Omega = sO + row.lambda * lO;

  const size_t after = std::count(st.active.begin(), st.active.end(), 1);
  rep.active_after = after;
  rep.excluded_added = static_cast<double>(before - after) / static_cast<double>(G);

  // measured size of P_{nu+1} on D(s_{nu+1}, r_{nu+1})
  const double s1 = row.s / 2, a1 = s1 / 20 / g.C_J;
  st.r = trivial ? st.r : row.r_next;
  real sup = measure_eps(st, cfg, s1, st.r, a1, 0.0L);
  real lam1 = 0;
  if (sup > 0 && sup < 1) lam1 = schedule(st.nu + 1, g, sup, st.r).lambda;
  st.eps = sup > 0 ? measure_eps(st, cfg, s1, st.r, a1, lam1) : sup;
  rep.eps_next_measured = st.eps;
  ++st.nu;

  // re-audit of the frequency hypotheses for the next step
  if (after > 0 && !trivial) {
    KamSchedule nx = schedule(st.nu, g, std::min<real>(std::max<real>(st.eps, 1e-300L), 0.5L), st.r);
    for (size_t p = 0; p < G; ++p) {
      if (!st.active[p]) continue;
      for (int b = 0; b < S.n(); ++b)
        if (std::abs(st.freq[p].omega(b)) > nx.E) {
          rep.hypothesis_failures.push_back("|omega| > E at point " + std::to_string(p));
          break;
        }
      // |<l, Omega>| >= m |sum j^2 l_j| for l = e_i +- e_j over the retained modes
      const auto& f = st.freq[p];
      for (int i = 0; i < S.mode_count(); ++i)
        for (int j = i; j < S.mode_count(); ++j)
          for (int sg : {1, -1}) {
            if (i == j && sg < 0) continue;
            long A = f.Om_int[i] + sg * f.Om_int[j];
            double v = static_cast<double>(A) + f.Om_small[i] + sg * f.Om_small[j];
            if (std::abs(v) + 1e-300 < nx.m * std::abs(static_cast<double>(A)))
              rep.hypothesis_failures.push_back("external frequency gap at point " + std::to_string(p));
          }
    }
    if (lo > nx.M1 - g.M10 && lo > 0)
      rep.hypothesis_failures.push_back("omega drift Lipschitz above the M1 allowance");
  }
  if (rep.eps_next_measured > 0 && !trivial && rep.eps_next_measured > rep.eps_next_schedule)
    rep.hypothesis_failures.push_back("measured eps above the schedule");
  return rep;
}

std::string report_json(const KamStepReport& r) {
  std::ostringstream os;
  const auto& w = r.row;
  os << "{\"nu\":" << r.nu << ",\"eps\":" << num(r.eps_measured)
     << ",\"eps_next\":" << num(r.eps_next_measured) << ",\"eps_next_schedule\":" << num(r.eps_next_schedule)
     << ",\"contraction_ratio\":" << num(r.contraction_ratio())
     << ",\"drift_omega\":" << num(r.drift_omega) << ",\"drift_Omega\":" << num(r.drift_Omega)
     << ",\"drift_bound\":" << num(r.drift_bound) << ",\"excluded_added\":" << num(r.excluded_added)
     << ",\"active_after\":" << r.active_after << ",\"zones1\":" << r.zones1 << ",\"zones2\":" << r.zones2
     << ",\"floor_events\":" << r.floor_events << ",\"F_terms\":" << r.F_terms
     << ",\"R_hat_terms\":" << r.R_hat_terms << ",\"lie_orders\":" << r.lie_orders
     << ",\"imag_drift\":" << num(r.imag_drift) << ",\"horizon\":" << (r.horizon ? "true" : "false")
     << ",\"momentum_ok\":" << (r.momentum_ok ? "true" : "false") << ",\"blocks\":[";
  for (int t = 0; t < 9; ++t) os << (t ? "," : "") << r.block_counts[t];
  os << "],\"schedule\":{\"s\":" << num(w.s) << ",\"sigma\":" << num(w.sigma) << ",\"a\":" << num(w.a)
     << ",\"B\":" << num(w.B) << ",\"K\":" << num(w.K) << ",\"Pi\":" << num(w.Pi)
     << ",\"alpha1\":" << num(w.alpha1) << ",\"alpha2\":" << num(w.alpha2) << ",\"lambda\":" << num(w.lambda)
     << ",\"eta\":" << num(w.eta) << ",\"r\":" << num(w.r) << ",\"r_next\":" << num(w.r_next)
     << ",\"m\":" << num(w.m) << ",\"E\":" << num(w.E) << ",\"M\":" << num(w.M) << ",\"M3\":" << num(w.M3)
     << "},\"hypothesis_failures\":[";
  for (size_t t = 0; t < r.hypothesis_failures.size(); ++t)
    os << (t ? "," : "") << "\"" << r.hypothesis_failures[t] << "\"";
  os << "]}";
  return os.str();
}

std::vector<FormalSeries> compose_embedding(const std::vector<FormalSeries>& gens, const SitePtr& sites,
                                            const TruncationBudget& b, int lie_order) {
  const SiteSet& S = *sites;
  std::vector<FormalSeries> coords;
  auto single = [&](Key k) { return FormalSeries::from_terms(sites, b, {{k, cplx(1.0)}}); };
  for (int t = 0; t < S.n(); ++t) {
    Key k;
    k.set_k(t, 1);
    coords.push_back(single(k));
  }
  for (int t = 0; t < S.n(); ++t) {
    Key k;
    k.set_i(t, 1);
    coords.push_back(single(k));
  }
  for (int m = 0; m < S.mode_count(); ++m) {
    Key k;
    k.add_var(zid(m));
    coords.push_back(single(k));
  }
  for (int m = 0; m < S.mode_count(); ++m) {
    Key k;
    k.add_var(zbid(m));
    coords.push_back(single(k));
  }
  for (auto& F : gens) {
    if (F.empty()) continue;
    for (auto& c : coords) c = weighted_lie_sum(c, F, b, lie_order > 0 ? lie_order : 40, w_exp, nullptr);
  }
  return coords;
}

RunResult run(const KamConfig& cfg, std::ostream* jsonl) {
  auto init = initial_state(cfg);
  KamState& st = init.state;
  RunResult res;
  res.eps0 = init.eps0;
  res.gate_ok = init.gate_ok;
  res.gate_rhs = init.gate_rhs;
  res.status = "max_steps";
  for (int t = 0; t < cfg.max_steps; ++t) {
    if (st.eps > 0 && st.eps < cfg.eps_floor) {
      res.status = "eps_floor";
      break;
    }
    if (!(st.eps < 1)) {
      res.status = "eps_not_small";
      break;
    }
    if (cfg.halt_on_horizon && st.eps > 0) {
      auto row = schedule(st.nu, cfg.globals, st.eps, st.r);
      if (row.K > cfg.fourier_max || row.Pi > st.sites->mode_cutoff()) {
        res.status = "horizon";
        break;
      }
    }
    auto rep = kam_step(st, cfg);
    if (jsonl) *jsonl << report_json(rep) << "\n";
    res.reports.push_back(rep);
    if (rep.active_after == 0) throw AllExcluded("every grid point was excluded at step " + std::to_string(rep.nu));
    if (cfg.enforce_contraction && rep.eps_next_measured > rep.eps_next_schedule && rep.eps_measured > 0)
      throw ContractionFailure("measured eps exceeds the schedule at step " + std::to_string(rep.nu), res.reports);
  }
  res.torus.mask = st.active;
  for (size_t p = 0; p < st.grid.size(); ++p) {
    if (!st.active[p]) continue;
    std::vector<double> om;
    for (int b = 0; b < st.sites->n(); ++b) om.push_back(st.freq[p].omega(b));
    res.torus.frequencies.push_back(om);
    res.torus.embedding.push_back(compose_embedding(st.generators[p], st.sites, st.budget, cfg.lie_order));
  }
  return res;
}

ContractionVerdict verify_contraction(const std::vector<KamStepReport>& reports, const KamGlobals& g) {
  ContractionVerdict v;
  v.ok = !reports.empty();
  if (reports.empty()) v.diagnostics.push_back("no reports");
  for (auto& r : reports) {
    const std::string tag = "step " + std::to_string(r.nu) + ": ";
    if (r.eps_measured == 0) {
      if (r.eps_next_measured != 0) {
        v.ok = false;
        v.diagnostics.push_back(tag + "perturbation reappeared");
      }
      continue;
    }
    if (!(r.eps_next_measured < r.eps_measured)) {
      v.ok = false;
      v.diagnostics.push_back(tag + "no contraction");
    }
    if (r.eps_next_measured > r.eps_next_schedule) {
      v.ok = false;
      v.diagnostics.push_back(tag + "eps above the schedule");
    }
    if (r.drift_omega > r.drift_bound || r.drift_Omega > r.drift_bound) {
      v.ok = false;
      v.diagnostics.push_back(tag + "frequency drift above B eps");
    }
    // B needed: eps_+ <= (B/alpha2)^{1/3} eps^kappa and drift <= B eps
    real need = std::pow(r.eps_next_measured / std::pow(r.eps_measured, static_cast<real>(g.kappa())), 3) *
                r.row.alpha2;
    need = std::max(need, std::max(r.drift_omega, r.drift_Omega) / r.eps_measured);
    real c = need * std::pow(static_cast<real>(r.row.sigma), static_cast<real>(g.B_exponent()));
    v.c_min = std::max(v.c_min, static_cast<double>(c));
  }
  return v;
}

}  // namespace dnlskam
