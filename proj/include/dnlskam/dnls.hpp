#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dnlskam/norms.hpp"

namespace dnlskam {

// F_{>=5}(x,u,ubar) term: c e^{i kappa x} u^a ubar^b
struct QuinticEntry {
  int kappa = 0;
  int u_pow = 0;
  int ubar_pow = 0;
  cplx c{0.0, 0.0};
};

struct DnlsConfig {
  int mode_cutoff = 6;
  double mu = 1.0;
  std::vector<QuinticEntry> quintic;
  int N = 1;            // Delta_1 threshold
  int degree_max = 6;   // q-degree budget of the normal form step
  void validate() const;
};

// Hamiltonian in q-coordinates (empty site set), labeled pieces
struct DnlsSplit {
  SitePtr sites;
  TruncationBudget budget;
  FormalSeries Lambda, B, Q1, Q2, K;
  FormalSeries G() const { return B + Q1 + Q2; }
  FormalSeries total() const { return Lambda + B + Q1 + Q2 + K; }
};

DnlsSplit build_dnls_hamiltonian(const DnlsConfig& cfg);

// q_j qbar_k q_l qbar_m is in Delta_1 when at least two of |j|,|k|,|l|,|m| are <= N
bool in_delta1(const Key& key, const SiteSet& fourier, int N);

struct BirkhoffResult {
  FormalSeries F4;
  FormalSeries H_nf;       // H o Phi_{F4}
  FormalSeries normal4;    // Lambda + B + Q2 (the order <= 4 target)
  FormalSeries R;          // everything of order >= 5 in H_nf
  std::vector<Key> zero_divisors;  // Delta_1 monomials left unsolved
  double delta1_residual = 0.0;    // max |Delta_1 coefficient| / max |Q1 coefficient| after the map
  double order4_mismatch = 0.0;    // max |(H_nf)_{<=4} - normal4| / max |normal4|
  int lie_orders = 0;
};

BirkhoffResult partial_birkhoff(const DnlsSplit& H, const TruncationBudget& budget);

// frequencies at one parameter point, integer part kept exact
struct Frequencies {
  std::vector<long> om_int;
  std::vector<double> om_small;
  std::vector<long> Om_int;  // by mode id
  std::vector<double> Om_small;
  double omega(int b) const { return static_cast<double>(om_int[b]) + om_small[b]; }
  double Omega(int m) const { return static_cast<double>(Om_int[m]) + Om_small[m]; }
};

// omega_b = j_b^2 + j_b xi_b,  Omega_j = j^2 + j sum(xi)/(n - 1/2)
Frequencies affine_frequencies(const SiteSet& s, const std::vector<double>& xi);

// c = 2 sum(xi)/(2n-1)
double drift_parameter(const std::vector<double>& xi);

std::vector<double> zeta_from_xi(const std::vector<int>& J, const std::vector<double>& xi);
std::vector<double> xi_from_zeta(const std::vector<int>& J, const std::vector<double>& zeta);
Eigen::MatrixXd dxi_dzeta(const std::vector<int>& J);
// closed-form inverse (4 pi/(2n-1)) diag(1/|j_b|) M'
Eigen::MatrixXd dxi_dzeta_inverse(const std::vector<int>& J);

struct FrequencyData {
  SitePtr sites;
  ParameterGrid grid;
  std::vector<Frequencies> at;  // one per grid point
  double M1 = 0.0, M2 = 0.0;    // nominal Lipschitz constants of the affine maps
};

FrequencyData frequency_maps(const SitePtr& sites, const ParameterGrid& grid,
                             bool bypass_admissibility = false);

// box inside Xi_r where every zeta_b > 0 (needs n = 2 or the generic interior cone)
ParameterGrid default_parameter_box(const std::vector<int>& J, double r, int per_axis);

struct ReducedHamiltonian {
  SitePtr sites;
  TruncationBudget budget;
  std::vector<double> xi, zeta;
  FormalSeries P;             // Qtilde + reduced Q2 + reduced R
  FormalSeries Qtilde;
  FormalSeries lambda_b_linear;  // y-linear and z zbar diagonal k=0 part of reduced Lambda+B
  double binomial_tail = 0.0;    // bound on dropped binomial terms at the corner of D(s,r)
  double rho = 0.0;              // max r^2 / zeta_b
};

// q_{j_b} = sqrt(zeta_b+y_b) e^{i x_b} with the square-root powers expanded to the budget
ReducedHamiltonian action_angle_reduce(const BirkhoffResult& nf, const SitePtr& sites,
                                       const std::vector<double>& xi, double r, double s,
                                       const TruncationBudget& budget, int expansion_order = 3);

// the same substitution for a single q-series (used by tests)
FormalSeries reduce_series(const FormalSeries& H, const SitePtr& sites, const std::vector<double>& zeta,
                           const TruncationBudget& budget, double r, double s = 0.0,
                           int expansion_order = 3, double* tail = nullptr);

}  // namespace dnlskam
