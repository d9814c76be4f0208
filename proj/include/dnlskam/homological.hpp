#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnlskam/dnls.hpp"
#include "dnlskam/fourier.hpp"

namespace dnlskam {

struct ExcludedParameter : std::runtime_error {
  std::vector<int> k;
  ExcludedParameter(const std::string& what, std::vector<int> kk)
      : std::runtime_error(what), k(std::move(kk)) {}
};
struct HypothesisFailure : std::runtime_error {
  std::vector<int> k;
  HypothesisFailure(const std::string& what, std::vector<int> kk = {})
      : std::runtime_error(what), k(std::move(kk)) {}
};
struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double dot(const std::vector<int>& k, const std::vector<double>& omega);

// d_omega F = R (minus its average); floor alpha1/<k>^tau is checked when alpha1 > 0
FourierFunction solve_diagonal(const FourierFunction& rhs, const std::vector<double>& omega,
                               bool remove_average, double alpha1 = 0.0, double tau = 0.0);

// -i d_omega u + lambda u + mu u = p
struct HomologicalProblem {
  std::vector<double> omega;
  double lambda = 0.0;
  FourierFunction mu;  // momentum tag 0
  FourierFunction p;
  std::vector<int> sites;  // for the momentum weight
  double s = 0.5, sigma = 0.1, a = 0.0;
  int K = 0;            // truncated solver
  int fourier_max = 8;  // exact solver
  // exact-solver hypotheses
  double alpha1 = 0.0, alpha2 = 0.0, gamma_t = 1.0, tau = 0.0, C = 0.0, C_J = 1.0;
  bool check_hypotheses = true;
};

struct BoundCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool pass() const { return lhs <= rhs; }
};

struct SolveReport {
  FourierFunction u, tail;
  std::vector<BoundCheck> checks;
  double residual = 0.0;  // sup of the retained-mode residual
  double p_norm = 0.0;    // sum |p_k|
  bool bounds_ok() const;
};

// 4^{n+tau} (8e+8)^n (6e+6)^n (1 + (3tau/e)^tau)
double lemma41_constant(int n, double tau);

SolveReport solve_variable_exact(const HomologicalProblem& prob);
SolveReport solve_variable_truncated(const HomologicalProblem& prob);

struct StepConstants {
  double alpha1 = 0.0, alpha2 = 0.0, tau = 5.0;
  int K = 1 << 20;
  int Pi = 1 << 20;
  double C0 = 0.0;
};

struct ExclusionEvent {
  Key key;
  std::string block;
  double divisor = 0.0;
  double floor = 0.0;
};

struct DispatchResult {
  FormalSeries F, R_hat, N_hat;
  std::vector<ExclusionEvent> events;
  // x, y, z|zbar, zz|zbar zbar, zzbar cases 1..4, diagonal with k != 0
  std::array<long, 9> counts{};
  bool excluded() const { return !events.empty(); }
};

// monomial divisor: {N, m} = -i d m with d = <k,omega> + <beta - alpha, Omega>;
// integer parts summed exactly
double monomial_divisor(const Key& key, const SiteSet& s, const Frequencies& f);

// R is the Taylor-2 part at one grid point
DispatchResult dispatch_and_solve_all(const FormalSeries& R, const Frequencies& f,
                                      const StepConstants& c);

}  // namespace dnlskam
