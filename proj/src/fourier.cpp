#include "dnlskam/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace dnlskam {

int l1(const std::vector<int>& k) {
  int s = 0;
  for (int v : k) s += std::abs(v);
  return s;
}

int FourierFunction::max_order() const {
  int m = 0;
  for (auto& [k, v] : c) m = std::max(m, l1(k));
  return m;
}

real norm_am(const FourierFunction& f, double s, double a_mom, const std::vector<int>& sites) {
  real acc = 0;
  for (auto& [k, v] : f.c) {
    long pi = f.mom;
    for (size_t b = 0; b < k.size() && b < sites.size(); ++b) pi += static_cast<long>(k[b]) * sites[b];
    acc += std::abs(v) * std::exp(static_cast<real>(s) * l1(k) + static_cast<real>(a_mom) * std::labs(pi));
  }
  return acc;
}

real norm_tau(const FourierFunction& f, double s, double t) {
  real acc = 0;
  for (auto& [k, v] : f.c) {
    int m = l1(k);
    if (m == 0) continue;
    acc += std::abs(v) * std::pow(static_cast<real>(m), static_cast<real>(t)) *
           std::exp(static_cast<real>(s) * m);
  }
  return acc;
}

std::pair<FourierFunction, FourierFunction> truncate(const FourierFunction& f, int K) {
  if (K < 0) throw std::invalid_argument("truncation order must be nonnegative");
  FourierFunction head{f.n, f.mom, {}}, tail{f.n, f.mom, {}};
  for (auto& [k, v] : f.c) (l1(k) <= K ? head : tail).c.emplace(k, v);
  return {head, tail};
}

std::vector<std::vector<int>> lattice_ball(int n, int K) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, -K);
  if (n == 0) return {{}};
  for (;;) {
    if (l1(k) <= K) out.push_back(k);
    int d = n - 1;
    while (d >= 0 && k[d] == K) k[d--] = -K;
    if (d < 0) break;
    ++k[d];
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return l1(a) < l1(b); });
  return out;
}

}  // namespace dnlskam
