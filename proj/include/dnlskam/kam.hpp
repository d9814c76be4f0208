#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnlskam/dnls.hpp"
#include "dnlskam/homological.hpp"
#include "dnlskam/nonres.hpp"

namespace dnlskam {

struct KamGlobals {
  int n = 2;
  int C_J = 2;
  double tau = 5.0;
  double beta = 1.0 / 13.0;
  double gamma0 = 0.0;  // 0 picks beta'/(800 max{C_00, C_J})
  double c = 1.0;       // constant of B_sigma
  double s0 = 0.4;
  double alpha0 = 1e-4;
  double m0 = 0.5, E0 = 4.0, M10 = 2.0, M20 = 4.0 / 3.0, M30 = 1.0 / 600.0;

  double beta_prime() const;
  double kappa() const;
  double C00() const { return 2 * E0 / m0; }
  double gamma0_value() const;
  double B_exponent() const { return 4 * n + 4 * tau + 5; }
  void validate() const;
};

// one row of the parameter schedule; small quantities in long double
struct KamSchedule {
  int nu = 0;
  double m = 0, E = 0, M1 = 0, M2 = 0, M = 0, M3 = 0;
  real J = 0;
  double s = 0, sigma = 0, a = 0;
  real B = 0, eps = 0, K = 0, Pi = 0;
  double alpha1 = 0;
  real alpha2 = 0, lambda = 0, eta = 0, r = 0, r_next = 0, eps_next = 0;
};

// row nu for a given eps_nu and r_nu; throws std::domain_error unless 0 < eps < 1
KamSchedule schedule(int nu, const KamGlobals& g, real eps_nu, real r_nu);
// rows 0..steps-1 from the recursion eps_{nu+1} = (B/alpha2)^{1/3} eps^kappa
std::vector<KamSchedule> schedule_table(const KamGlobals& g, real eps0, real r0, int steps);

struct KamConfig {
  std::vector<int> J{-1, 2};
  DnlsConfig dnls = [] {
    DnlsConfig d;
    d.N = 0;  // 0: max |j_b|
    return d;
  }();  // mode_cutoff doubles as J_max
  int degree_max = 4;
  int fourier_max = 24;
  double r = 1e-6;    // sets the parameter box [f rho, rho]^n, rho = r^{3/2}/sqrt(n)
  int per_axis = 4;   // grid resolution
  double p = 2.0, q = 1.0, a = 0.0;
  KamGlobals globals;
  int max_steps = 3;
  real eps_floor = 1e-30L;
  int lie_order = 0;  // 0: until the terms vanish relative to 1e-22
  EnumRanges ranges{24, 0};  // mode_max 0 means J_max
  bool enforce_contraction = true;
  bool halt_on_horizon = false;  // stop once K > fourier_max or Pi > J_max
  uint64_t seed = 1;
  DnlsConfig dnls_resolved() const;
  void validate() const;
};

struct KamState {
  int nu = 0;
  SitePtr sites;
  TruncationBudget budget;
  ParameterGrid grid;
  std::vector<Frequencies> freq;  // per grid point
  std::vector<FormalSeries> P;    // per grid point
  std::vector<char> active;
  ExclusionLedger ledger;
  real r = 0, eps = 0;
  std::vector<std::vector<FormalSeries>> generators;  // F_1..F_nu per grid point
};

struct KamStepReport {
  int nu = 0;
  KamSchedule row;
  real eps_measured = 0;       // of P_nu at the start of the step
  real eps_next_measured = 0;  // of P_{nu+1}
  real eps_next_schedule = 0;
  real drift_omega = 0, drift_Omega = 0;  // with the lambda_nu Lipschitz part
  real drift_bound = 0;                   // B_nu eps_nu
  double excluded_added = 0;              // fraction of the grid removed this step
  size_t active_after = 0;
  long zones1 = 0, zones2 = 0, floor_events = 0;
  std::array<long, 9> block_counts{};
  long F_terms = 0, R_hat_terms = 0;
  int lie_orders = 0;
  double imag_drift = 0;  // imaginary parts seen in the normal-form update
  bool horizon = false;   // K or Pi beyond the truncation
  bool momentum_ok = true;
  std::vector<std::string> hypothesis_failures;
  double contraction_ratio() const;  // log eps_{nu+1} / log eps_nu
};

struct ContractionFailure : std::runtime_error {
  std::vector<KamStepReport> reports;
  ContractionFailure(const std::string& w, std::vector<KamStepReport> r)
      : std::runtime_error(w), reports(std::move(r)) {}
};
struct AllExcluded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InitialData {
  KamState state;
  real eps0 = 0;
  real gate_rhs = 0;  // (alpha0 gamma)^{1+beta}
  bool gate_ok = false;
  double birkhoff_residual = 0;
};

// DNLS -> Birkhoff -> action-angle reduction on every grid point
InitialData initial_state(const KamConfig& cfg);

real measure_eps(const KamState& st, const KamConfig& cfg, double s, real r, double a_mom, real lambda);

KamStepReport kam_step(KamState& st, const KamConfig& cfg);

struct TorusOutput {
  std::vector<char> mask;
  std::vector<std::vector<double>> frequencies;  // omega_nu at each surviving point
  // e^{i x_b}, y_b, z_j, zbar_j composed with Phi^nu, per surviving point
  std::vector<std::vector<FormalSeries>> embedding;
};

struct RunResult {
  real eps0 = 0;
  bool gate_ok = false;
  real gate_rhs = 0;
  std::vector<KamStepReport> reports;
  TorusOutput torus;
  std::string status;
};

RunResult run(const KamConfig& cfg, std::ostream* jsonl = nullptr);

struct ContractionVerdict {
  bool ok = false;
  std::vector<std::string> diagnostics;
  double c_min = 0;  // smallest c making every measured step inequality hold
};
ContractionVerdict verify_contraction(const std::vector<KamStepReport>& reports,
                                      const KamGlobals& g);

std::string report_json(const KamStepReport& r);

// coordinate functions composed with X_{F_1}^1 o ... o X_{F_nu}^1
std::vector<FormalSeries> compose_embedding(const std::vector<FormalSeries>& gens,
                                            const SitePtr& sites, const TruncationBudget& b,
                                            int lie_order);

}  // namespace dnlskam
