#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnlskam {

struct IndexError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

int sign(long j);

// Tangential sites J plus the retained normal modes Z_* = {0<|j|<=J_max} \ J.
// With no sites this is the plain Fourier-coordinate setting (every mode normal).
class SiteSet {
 public:
  SiteSet() = default;
  SiteSet(std::vector<int> sites, int mode_cutoff);
  static SiteSet fourier(int mode_cutoff) { return SiteSet({}, mode_cutoff); }

  int n() const { return static_cast<int>(sites_.size()); }
  const std::vector<int>& sites() const { return sites_; }
  int site(int b) const { return sites_[b]; }
  int c_J() const { return c_J_; }
  int mode_cutoff() const { return mode_cutoff_; }
  const std::vector<int>& modes() const { return modes_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  int mode(int id) const { return modes_[id]; }
  // -1 when j is not a retained normal mode
  int mode_id(int j) const;
  bool is_site(int j) const;
  int site_index(int j) const;
  long site_sum() const;
  long site_abs_sum() const;

  bool operator==(const SiteSet& o) const {
    return sites_ == o.sites_ && mode_cutoff_ == o.mode_cutoff_;
  }

 private:
  std::vector<int> sites_;
  int c_J_ = 0;
  int mode_cutoff_ = 0;
  std::vector<int> modes_;
  std::vector<int> lookup_;  // offset by mode_cutoff_
};

enum class Verdict { admissible, violates_divisibility, violates_sign_condition };
std::string to_string(Verdict v);
Verdict admissible(const std::vector<int>& J);

// readable multi-index (k, i, alpha, beta); the series code uses a packed key
struct MultiIndex {
  std::vector<int> k;
  std::vector<int> i;
  std::map<int, int> alpha;  // mode j -> power
  std::map<int, int> beta;
  int weighted_degree() const;
};

long momentum_scalar(const std::vector<int>& k, const std::map<int, int>& alpha,
                     const std::map<int, int>& beta, const std::vector<int>& J);
long momentum_scalar(const MultiIndex& m, const std::vector<int>& J);

struct ComponentLabel {
  enum Kind : int { x = 0, y = 1, z = 2, zbar = 3 };
  Kind kind;
  int index;  // site slot b for x/y, mode j for z/zbar
  auto operator<=>(const ComponentLabel&) const = default;
  std::string str() const;
};

long momentum_vf(const MultiIndex& m, const ComponentLabel& v, const std::vector<int>& J);

}  // namespace dnlskam
