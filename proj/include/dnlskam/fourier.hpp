#pragma once

#include <map>
#include <utility>
#include <vector>

#include "dnlskam/norms.hpp"

namespace dnlskam {

// trigonometric polynomial on T^n with a momentum tag m for the |.|_{s,a,m} norm
struct FourierFunction {
  int n = 0;
  long mom = 0;
  std::map<std::vector<int>, cplx> c;

  cplx at(const std::vector<int>& k) const {
    auto it = c.find(k);
    return it == c.end() ? cplx(0.0) : it->second;
  }
  int max_order() const;
};

int l1(const std::vector<int>& k);
inline int bracket_k(const std::vector<int>& k) { return std::max(1, l1(k)); }

// sum |u_k| e^{|k|s} e^{a|pi(k,m)|},  pi(k,m) = sum k_b j_b + m
real norm_am(const FourierFunction& f, double s, double a_mom, const std::vector<int>& sites);
// sum |u_k| |k|^t e^{|k|s}
real norm_tau(const FourierFunction& f, double s, double t);

// Gamma_K f and (1 - Gamma_K) f
std::pair<FourierFunction, FourierFunction> truncate(const FourierFunction& f, int K);

// all k in Z^n with |k|_1 <= K, graded by |k| then lexicographic
std::vector<std::vector<int>> lattice_ball(int n, int K);

}  // namespace dnlskam
