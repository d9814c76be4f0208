#include "dnlskam/homological.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

namespace dnlskam {

namespace {

const cplx I(0.0, 1.0);

double sup_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<int> add(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c(a.size());
  for (size_t t = 0; t < a.size(); ++t) c[t] = a[t] + b[t];
  return c;
}

double sum_abs(const FourierFunction& f) {
  double s = 0;
  for (auto& [k, v] : f.c) s += std::abs(v);
  return s;
}

struct Galerkin {
  std::vector<std::vector<int>> modes;
  std::map<std::vector<int>, int> index;
};

Galerkin galerkin(int n, int K) {
  Galerkin g;
  g.modes = lattice_ball(n, K);
  for (size_t t = 0; t < g.modes.size(); ++t) g.index.emplace(g.modes[t], static_cast<int>(t));
  return g;
}

// (diag(<k,omega> + lambda) + conv(mu)) u = p on the ball; residual on the ball
void galerkin_solve(const HomologicalProblem& prob, const Galerkin& g, SolveReport& rep) {
  const int N = static_cast<int>(g.modes.size());
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
  for (auto& [k, v] : prob.p.c) {
    auto it = g.index.find(k);
    if (it != g.index.end()) rhs(it->second) = v;
  }
  Eigen::VectorXcd u(N);
  if (prob.mu.c.empty()) {
    for (int t = 0; t < N; ++t) {
      double d = dot(g.modes[t], prob.omega) + prob.lambda;
      if (rhs(t) != std::complex<double>(0.0)) {
        if (d == 0.0) throw SolveFailure("zero divisor in the diagonal solve");
        u(t) = rhs(t) / d;
      } else {
        u(t) = 0.0;
      }
    }
  } else {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
    for (int t = 0; t < N; ++t) A(t, t) = dot(g.modes[t], prob.omega) + prob.lambda;
    for (int l = 0; l < N; ++l)
      for (auto& [m, v] : prob.mu.c) {
        auto it = g.index.find(add(g.modes[l], m));
        if (it != g.index.end()) A(it->second, l) += v;
      }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    u = lu.solve(rhs);
    if (!u.allFinite()) throw SolveFailure("singular Galerkin system");
    Eigen::VectorXcd r = A * u - rhs;
    rep.residual = r.cwiseAbs().maxCoeff();
  }
  rep.u = FourierFunction{prob.p.n, prob.p.mom, {}};
  for (int t = 0; t < N; ++t)
    if (u(t) != std::complex<double>(0.0)) rep.u.c.emplace(g.modes[t], cplx(u(t)));
}

void check_residual(const SolveReport& rep) {
  if (rep.residual > 1e-9 * std::max(rep.p_norm, 1e-300))
    throw SolveFailure("residual " + std::to_string(rep.residual) + " above 1e-9 |p|");
}

}  // namespace

double dot(const std::vector<int>& k, const std::vector<double>& omega) {
  double s = 0;
  for (size_t b = 0; b < k.size(); ++b) s += k[b] * omega[b];
  return s;
}

FourierFunction solve_diagonal(const FourierFunction& rhs, const std::vector<double>& omega,
                               bool remove_average, double alpha1, double tau) {
  FourierFunction F{rhs.n, rhs.mom, {}};
  for (auto& [k, v] : rhs.c) {
    if (l1(k) == 0) {
      if (!remove_average && v != cplx(0.0))
        throw ExcludedParameter("constant mode cannot be solved without removing the average", k);
      continue;
    }
    double d = dot(k, omega);
    double floor = alpha1 > 0 ? alpha1 / std::pow(static_cast<double>(bracket_k(k)), tau) : 0.0;
    if (std::abs(d) < floor || d == 0.0) throw ExcludedParameter("divisor below the floor", k);
    F.c.emplace(k, v / (I * static_cast<long double>(d)));
  }
  return F;
}

bool SolveReport::bounds_ok() const {
  for (auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

double lemma41_constant(int n, double tau) {
  const double e = std::exp(1.0);
  double tail = tau > 0 ? std::pow(3 * tau / e, tau) : 0.0;
  return std::pow(4.0, n + tau) * std::pow(8 * e + 8, n) * std::pow(6 * e + 6, n) * (1 + tail);
}

SolveReport solve_variable_exact(const HomologicalProblem& prob) {
  const int n = prob.p.n;
  if (static_cast<int>(prob.omega.size()) != n) throw HypothesisFailure("omega has the wrong length");
  auto g = galerkin(n, prob.fourier_max);
  if (prob.check_hypotheses) {
    if (!(4 * prob.a * prob.C_J <= prob.sigma && prob.sigma < std::min(1.0, prob.s)))
      throw HypothesisFailure("need 4 a C_J <= sigma < min(1, s)");
    double mu_norm = static_cast<double>(norm_tau(prob.mu, prob.s, prob.tau + 1));
    if (mu_norm > prob.C * prob.gamma_t)
      throw HypothesisFailure("|mu|_{s,tau+1} = " + std::to_string(mu_norm) + " exceeds C gamma");
    for (auto& k : g.modes) {
      double kt = std::pow(static_cast<double>(l1(k)), prob.tau);
      double d = dot(k, prob.omega);
      if (l1(k) > 0 && std::abs(d) < prob.alpha1 / kt)
        throw ExcludedParameter("small divisor <k,omega>", k);
      if (std::abs(d + prob.lambda) < prob.alpha2 * prob.gamma_t / (1 + kt))
        throw ExcludedParameter("small divisor <k,omega> + lambda", k);
    }
  }
  SolveReport rep;
  rep.p_norm = sum_abs(prob.p);
  galerkin_solve(prob, g, rep);
  check_residual(rep);
  if (prob.alpha1 > 0 && prob.alpha2 > 0) {
    double c = lemma41_constant(n, prob.tau);
    double pn = static_cast<double>(norm_am(prob.p, prob.s, prob.a, prob.sites));
    double rhs = c / (prob.alpha2 * prob.gamma_t * std::pow(prob.sigma, 2 * n + prob.tau)) *
                 std::exp(2 * prob.C * prob.gamma_t * prob.s / prob.alpha1) * pn;
    double lhs = static_cast<double>(norm_am(rep.u, prob.s - prob.sigma, prob.a, prob.sites));
    rep.checks.push_back({"exact_solution_bound", lhs, rhs});
  }
  return rep;
}

SolveReport solve_variable_truncated(const HomologicalProblem& prob) {
  const int n = prob.p.n;
  if (static_cast<int>(prob.omega.size()) != n) throw HypothesisFailure("omega has the wrong length");
  if (prob.lambda == 0.0) throw HypothesisFailure("lambda = 0");
  const double lam = std::abs(prob.lambda);
  if (!(2.0 * prob.K * sup_abs(prob.omega) <= lam))
    throw HypothesisFailure("2 K |omega| exceeds |lambda|");
  FourierFunction mu0 = prob.mu;
  mu0.mom = 0;
  double mun = static_cast<double>(norm_am(mu0, prob.s, prob.a, prob.sites));
  if (mun > lam / 4) throw HypothesisFailure("mu too large: " + std::to_string(mun));

  auto g = galerkin(n, prob.K);
  auto [pK, pTail] = truncate(prob.p, prob.K);
  SolveReport rep;
  rep.p_norm = sum_abs(pK);
  HomologicalProblem q = prob;
  q.p = pK;
  galerkin_solve(q, g, rep);
  check_residual(rep);

  // (1 - Gamma_K)(mu u)
  rep.tail = FourierFunction{n, prob.p.mom, {}};
  for (auto& [k, uv] : rep.u.c)
    for (auto& [m, mv] : prob.mu.c) {
      auto km = add(k, m);
      if (l1(km) > prob.K) rep.tail.c[km] += mv * uv;
    }

  double pn = static_cast<double>(norm_am(pK, prob.s, prob.a, prob.sites));
  double un = static_cast<double>(norm_am(rep.u, prob.s, prob.a, prob.sites));
  double tn = static_cast<double>(norm_am(rep.tail, prob.s - prob.sigma, prob.a, prob.sites));
  rep.checks.push_back({"truncated_solution_bound", un, 4 * pn / lam});
  rep.checks.push_back({"truncated_tail_bound", tn, std::exp(-prob.K * prob.sigma) * pn});
  return rep;
}

double monomial_divisor(const Key& key, const SiteSet& s, const Frequencies& f) {
  long A = 0;
  double d = 0;
  for (int b = 0; b < s.n(); ++b) {
    A += key.k(b) * f.om_int[b];
    d += key.k(b) * f.om_small[b];
  }
  for (int t = 0; t < key.nv(); ++t) {
    int id = key.var(t), sg = id & 1 ? 1 : -1;
    A += sg * f.Om_int[id >> 1];
    d += sg * f.Om_small[id >> 1];
  }
  return static_cast<double>(A) + d;
}

DispatchResult dispatch_and_solve_all(const FormalSeries& R, const Frequencies& f,
                                      const StepConstants& c) {
  const SiteSet& s = R.sites();
  DispatchResult out{FormalSeries(R.site_ptr(), R.budget()), FormalSeries(R.site_ptr(), R.budget()),
                     FormalSeries(R.site_ptr(), R.budget()), {}, {}};
  auto& F = out.F.mutable_terms();
  auto& Rh = out.R_hat.mutable_terms();
  auto& Nh = out.N_hat.mutable_terms();
  const double CK = c.C0 * c.K;

  for (auto& [key, coef] : R.terms()) {
    if (!in_taylor_R(key)) continue;
    if (in_normal_part(key)) {
      Nh.push_back({key, coef});
      continue;
    }
    const double kb = std::pow(static_cast<double>(std::max(1, key.kabs())), c.tau);
    const double d = monomial_divisor(key, s, f);
    double floor = c.alpha1 / kb;
    bool truncated = false;
    std::string block;
    const int nv = key.nv();

    if (nv == 0) {
      block = key.iabs() == 0 ? "x" : "y";
      ++out.counts[key.iabs() == 0 ? 0 : 1];
    } else if (nv == 1) {
      int j = s.mode(key.var(0) >> 1);
      block = key.var(0) & 1 ? "zbar" : "z";
      ++out.counts[2];
      floor *= std::abs(j);
      truncated = std::abs(j) > CK;
    } else {
      int id0 = key.var(0), id1 = key.var(1);
      int i = s.mode(id0 >> 1), j = s.mode(id1 >> 1);
      bool mixed = (id0 & 1) != (id1 & 1);
      if (!mixed) {
        block = id0 & 1 ? "zbar zbar" : "zz";
        ++out.counts[3];
        floor *= (i == j) ? 2.0 * std::abs(i) : std::max(std::abs(i), std::abs(j));
        truncated = std::max(std::abs(i), std::abs(j)) > CK;
      } else if (i == j) {
        block = "diag";
        ++out.counts[8];
      } else if (i == -j) {
        if (std::abs(j) > c.Pi) {
          ++out.counts[7];
          Rh.push_back({key, coef});
          continue;
        }
        block = "zzbar case 3";
        ++out.counts[6];
        floor = c.alpha2 * std::abs(j) / kb;
      } else {
        truncated = std::max(std::abs(i), std::abs(j)) > CK;
        block = truncated ? "zzbar case 2" : "zzbar case 1";
        ++out.counts[truncated ? 5 : 4];
        floor *= std::max(std::abs(i), std::abs(j));
      }
    }

    if (truncated) {
      // off the Galerkin ball the term stays in the perturbation
      if (key.kabs() > c.K) {
        Rh.push_back({key, coef});
        continue;
      }
      if (d == 0.0) {
        out.events.push_back({key, block, d, 0.0});
        continue;
      }
    } else if (std::abs(d) < floor || d == 0.0) {
      out.events.push_back({key, block, d, floor});
      continue;
    }
    F.push_back({key, coef / (I * static_cast<long double>(d))});
  }
  return out;
}

}  // namespace dnlskam
