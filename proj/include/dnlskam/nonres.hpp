#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnlskam/dnls.hpp"

namespace dnlskam {

// k in Z^n, l = sum c_j e_j with sum |c_j| <= 2 over normal modes
struct DivisorSpec {
  std::vector<int> k;
  std::vector<std::pair<int, int>> l;  // (mode j, coefficient), sorted by j

  void validate(const SiteSet& s) const;
  int k_abs() const;
  int l_abs() const;
  long jl_sum() const;  // sum |j l_j|
  long max_size() const { return std::max<long>(k_abs(), jl_sum()); }
  double k_bracket() const { return std::max(1, k_abs()); }
  double l_inf_bracket() const;  // max{1, sup |j l_j|}
  // l = e_{-j} - e_j for some j (either orientation); returns |j| or 0
  int drift_pair() const;
  std::string str() const;
};

// D = A + sum_b g_b xi_b with g_b = num_b / (2n-1), all exact
struct AffineDivisor {
  long long A = 0;
  std::vector<long long> num;
  long long den = 1;
  double grad(int b) const { return static_cast<double>(num[b]) / static_cast<double>(den); }
  bool identically_zero() const;
};

AffineDivisor affine_divisor(const DivisorSpec& spec, const std::vector<int>& J);

// value of Omega_j / omega_b at grid point p; modes outside the tabulated cutoff use the affine map
double site_frequency(const FrequencyData& fd, size_t p, int b);
double mode_frequency(const FrequencyData& fd, size_t p, int j);

double divisor(const DivisorSpec& spec, const Frequencies& f, const SiteSet& s);
double divisor(const DivisorSpec& spec, const FrequencyData& fd, size_t p);

enum class Lemma32 { inequality_0, inequality_b, none };
struct Lemma32Result {
  Lemma32 kind = Lemma32::none;
  int b = -1;  // slot for inequality_b
};
std::string to_string(const Lemma32Result& r);
Lemma32Result lemma32(const std::vector<int>& k, const std::vector<std::pair<int, int>>& l,
                      const std::vector<int>& J);

struct EnumRanges {
  int k_max = 20;     // |k|_1 bound
  int mode_max = 60;  // |j| bound for l
};

std::vector<std::vector<int>> enumerate_k(int n, int kmax);
// all l with |l| <= 2 over normal modes |j| <= mode_max (l = 0 included)
std::vector<std::vector<std::pair<int, int>>> enumerate_l(const SiteSet& s, int mode_max);

struct AssumptionWitness {
  std::string assumption;
  std::string detail;
  double value = 0.0;
  double bound = 0.0;
};

struct AssumptionAudit {
  double m = 0.0, M1 = 0.0, M2 = 0.0, M3 = 0.0;
  double m_paper = 0.5, M1_paper = 0.0, M2_paper = 0.0, M3_paper = 0.0;
  long specs_checked = 0;
  long lemma32_none = 0;
  std::vector<AssumptionWitness> witnesses;
  bool ok() const { return witnesses.empty(); }
};

// M3 uses inf over the parameter box of |D| plus |grad D| (the quotient along the unit gradient)
AssumptionAudit audit_assumptions(const FrequencyData& fd, const EnumRanges& ranges);

// volume of {xi in [lo,hi]: c_lo < g.xi < c_hi}
double slab_volume(const std::vector<double>& lo, const std::vector<double>& hi,
                   const std::vector<double>& g, double c_lo, double c_hi);

struct ResonanceZone {
  DivisorSpec spec;
  double alpha = 0.0, tau = 0.0, weight = 1.0, threshold = 0.0;
  std::vector<char> excluded;  // per grid point
  size_t excluded_count = 0;
  double min_abs = 0.0;
  double grid_measure = 0.0;
  std::optional<double> analytic_measure;
  size_t crossing_cells = 0;  // cells cut by |D| = threshold
  bool identically_zero = false;
};

// weight is |j| for the drift family and <l>_inf otherwise; analytic measure only at step 0
ResonanceZone resonance_zone(const DivisorSpec& spec, double alpha, double tau,
                             const FrequencyData& fd, bool affine = true,
                             const std::vector<char>* active = nullptr);

struct StepExclusion {
  int nu = 0;
  double alpha1 = 0.0, alpha2 = 0.0, tau = 0.0;
  int Pi = 0;
  std::vector<char> mask1, mask2;  // Theta^1 and Theta^2 parts of this step
  size_t zones1 = 0, zones2 = 0;   // zones with at least one excluded point
  double analytic1 = 0.0, analytic2 = 0.0;  // sums of zone measures (union bound)
  double grid1 = 0.0, grid2 = 0.0;
  long specs = 0;
  bool identically_zero = false;
};

struct ExclusionLedger {
  ParameterGrid grid;
  std::vector<StepExclusion> steps;
  std::vector<char> cumulative;
  std::vector<ResonanceZone> zones;  // nonempty zones only (capped)
  size_t zone_cap = 2000;

  void add(StepExclusion st);
  double excluded_fraction() const;
  std::vector<char> active() const;
};

// removes every resonance zone of one step; affine = frequencies still equal to the affine maps
StepExclusion exclude_step(const FrequencyData& fd, const EnumRanges& ranges, int nu,
                           double alpha1, double alpha2, double tau, int Pi,
                           const std::vector<char>* active, bool affine,
                           std::vector<ResonanceZone>* keep = nullptr, size_t cap = 2000);

struct MeasureReport {
  double excluded_fraction = 0.0;
  double theta1_grid = 0.0, theta2_grid = 0.0;
  double theta1_analytic = 0.0, theta2_analytic = 0.0;
  double box_volume = 0.0;
  double rho = 0.0;
  double bound_constant = 0.0;  // realized c in |O \ O_alpha| <= c rho^{n-1} alpha
  std::vector<double> sweep_alpha, sweep_measure;
  double slope = 0.0;  // log2 of the doubling ratio, averaged
};

MeasureReport measure_report(const ExclusionLedger& ledger, double alpha, double rho);

// analytic excluded measure (union bound) at step 0 for alpha, 2 alpha, 4 alpha, ...;
// the drift family uses alpha * alpha2_ratio
void alpha_sweep(const FrequencyData& fd, const EnumRanges& ranges, double alpha0,
                 double alpha2_ratio, double tau, int Pi, int doublings, MeasureReport& rep);

void write_zone_csv(std::ostream& os, const std::vector<ResonanceZone>& zones);

}  // namespace dnlskam
