#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnlskam/norms.hpp"

namespace dnlskam {

struct InequalityTally {
  std::string lemma;  // "8.1a", "8.1b", "8.1c", "8.2", "8.3", "8.4", "8.5"
  std::string statement;
  int passed = 0;
  int failed = 0;
  double worst_ratio = 0.0;  // max lhs/rhs seen
  std::vector<std::string> witnesses;  // first few failures
  bool diagnostic = false;  // extra variant, not one of the stated inequalities
  bool ok() const { return failed == 0 && passed > 0; }
};

struct AppendixReport {
  std::vector<InequalityTally> tallies;
  // every stated inequality passed (diagnostic variants ignored)
  bool all_passed() const;
};

// F = 0, H = y_1: the stated flow bound reduces to 1/s' <= 1/s, false for every s' < s.
// Returns lhs and rhs of that instance.
std::pair<real, real> lemma85_zero_flow_instance(double s, double s2, double r, double r2);

// both sides of each appendix inequality on sample_count random instances per lemma;
// Fourier supports are truncated at |k| <= kmax
AppendixReport verify_appendix_bounds(int sample_count, uint64_t seed, int kmax = 40);

// pieces reused by tests
long lattice_shell_count(int n, int m);  // #{k in Z^n : |k|_1 = m}
real exp_sum(int n, double sigma, double nu, int kmax);  // sum e^{-2|k|sigma}|k|^nu
real exp_sup(int n, double sigma, double nu, int kmax);  // max e^{-|k|sigma}|k|^nu

}  // namespace dnlskam
