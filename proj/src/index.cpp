#include "dnlskam/index.hpp"

#include <algorithm>
#include <cstdlib>

namespace dnlskam {

int sign(long j) {
  if (j == 0) throw IndexError("sign: index 0 is excluded");
  return j > 0 ? 1 : -1;
}

SiteSet::SiteSet(std::vector<int> sites, int mode_cutoff)
    : sites_(std::move(sites)), mode_cutoff_(mode_cutoff) {
  if (mode_cutoff_ < 1) throw IndexError("mode cutoff must be positive");
  for (size_t b = 0; b < sites_.size(); ++b) {
    if (sites_[b] == 0) throw IndexError("site 0 is not allowed");
    if (b > 0 && sites_[b] <= sites_[b - 1])
      throw IndexError("sites must be strictly increasing");
    c_J_ = std::max(c_J_, std::abs(sites_[b]));
  }
  lookup_.assign(2 * mode_cutoff_ + 1, -1);
  for (int j = -mode_cutoff_; j <= mode_cutoff_; ++j) {
    if (j == 0 || is_site(j)) continue;
    lookup_[j + mode_cutoff_] = static_cast<int>(modes_.size());
    modes_.push_back(j);
  }
  if (modes_.size() > 120) throw IndexError("too many normal modes for packed keys");
}

int SiteSet::mode_id(int j) const {
  if (j < -mode_cutoff_ || j > mode_cutoff_) return -1;
  return lookup_[j + mode_cutoff_];
}

bool SiteSet::is_site(int j) const {
  return std::binary_search(sites_.begin(), sites_.end(), j);
}

int SiteSet::site_index(int j) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), j);
  if (it == sites_.end() || *it != j) return -1;
  return static_cast<int>(it - sites_.begin());
}

long SiteSet::site_sum() const {
  long s = 0;
  for (int j : sites_) s += j;
  return s;
}

long SiteSet::site_abs_sum() const {
  long s = 0;
  for (int j : sites_) s += std::abs(j);
  return s;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::admissible: return "admissible";
    case Verdict::violates_divisibility: return "violates_divisibility";
    case Verdict::violates_sign_condition: return "violates_sign_condition";
  }
  return "?";
}

Verdict admissible(const std::vector<int>& J) {
  const long n = static_cast<long>(J.size());
  if (n < 2) throw IndexError("admissibility needs n >= 2 sites");
  for (size_t b = 0; b < J.size(); ++b) {
    if (J[b] == 0) throw IndexError("site 0 is not allowed");
    for (size_t c = 0; c < b; ++c)
      if (J[b] == J[c]) throw IndexError("sites must be distinct");
  }
  long sum = 0;
  for (int j : J) sum += j;
  // {1,2} breaks both; the sign verdict wins
  if (n == 2 && static_cast<long>(J[0]) * J[1] > 0) return Verdict::violates_sign_condition;
  if (sum % (2 * n - 1) == 0) return Verdict::violates_divisibility;
  return Verdict::admissible;
}

int MultiIndex::weighted_degree() const {
  int d = 0;
  for (int v : i) d += 2 * v;
  for (auto& [j, p] : alpha) d += p;
  for (auto& [j, p] : beta) d += p;
  return d;
}

long momentum_scalar(const std::vector<int>& k, const std::map<int, int>& alpha,
                     const std::map<int, int>& beta, const std::vector<int>& J) {
  long m = 0;
  for (size_t b = 0; b < k.size() && b < J.size(); ++b) m += static_cast<long>(k[b]) * J[b];
  for (auto& [j, p] : alpha) m += static_cast<long>(p) * j;
  for (auto& [j, p] : beta) m -= static_cast<long>(p) * j;
  return m;
}

long momentum_scalar(const MultiIndex& m, const std::vector<int>& J) {
  return momentum_scalar(m.k, m.alpha, m.beta, J);
}

long momentum_vf(const MultiIndex& m, const ComponentLabel& v, const std::vector<int>& J) {
  long p = momentum_scalar(m, J);
  if (v.kind == ComponentLabel::z) return p - v.index;
  if (v.kind == ComponentLabel::zbar) return p + v.index;
  return p;
}

std::string ComponentLabel::str() const {
  static const char* names[] = {"x", "y", "z", "zbar"};
  return std::string(names[kind]) + "_" + std::to_string(index);
}

}  // namespace dnlskam
