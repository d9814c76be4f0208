#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <cstring>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dnlskam/index.hpp"

namespace dnlskam {

using cplx = std::complex<long double>;

inline constexpr int kMaxN = 6;
inline constexpr int kMaxVars = 19;

// Packed monomial e^{ik.x} y^i z^alpha zbar^beta.
// bytes [0,6) k, [6,12) i, [12] number of z/zbar factors, then sorted variable
// ids 2*mode_id + (zbar ? 1 : 0), one entry per unit of power.
struct Key {
  std::array<uint8_t, 32> b{};

  int k(int s) const { return static_cast<int8_t>(b[s]); }
  int i(int s) const { return b[6 + s]; }
  int nv() const { return b[12]; }
  int var(int t) const { return b[13 + t]; }
  void set_k(int s, int v);
  void set_i(int s, int v);
  // multiplicity of a variable id
  int count(int id) const;
  int degree() const;
  int kabs() const;
  int iabs() const;
  bool has_var(int id) const { return count(id) > 0; }

  void add_var(int id);
  // removes one copy, returns false if absent
  bool remove_var(int id);

  bool operator==(const Key& o) const { return b == o.b; }
  bool operator<(const Key& o) const { return std::memcmp(b.data(), o.b.data(), 32) < 0; }
};

Key key_product(const Key& a, const Key& c);

inline int zid(int mode_id) { return 2 * mode_id; }
inline int zbid(int mode_id) { return 2 * mode_id + 1; }

struct KeyHash {
  size_t operator()(const Key& key) const noexcept {
    uint64_t w[4];
    std::memcpy(w, key.b.data(), 32);
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint64_t v : w) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<size_t>(h ^ (h >> 33));
  }
};

struct TruncationBudget {
  int degree_max = 4;
  int fourier_max = 24;
  int mode_cutoff = 8;
  bool admits(const Key& key) const {
    return key.degree() <= degree_max && key.kabs() <= fourier_max;
  }
};

using SitePtr = std::shared_ptr<const SiteSet>;

class FormalSeries {
 public:
  using Term = std::pair<Key, cplx>;

  FormalSeries() = default;
  FormalSeries(SitePtr s, TruncationBudget budget) : sites_(std::move(s)), budget_(budget) {}

  const SiteSet& sites() const { return *sites_; }
  const SitePtr& site_ptr() const { return sites_; }
  const TruncationBudget& budget() const { return budget_; }
  const std::vector<Term>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  cplx coeff(const Key& key) const;
  double pruned_mass() const { return pruned_mass_; }
  FormalSeries with_budget(TruncationBudget b) const;

  // builders keep the vector sorted and free of zeros
  static FormalSeries from_terms(SitePtr s, TruncationBudget budget, std::vector<Term> terms,
                                 long double prune = kPrune);
  static constexpr long double kPrune = 1e-4800L;

  std::vector<Term>& mutable_terms() { return terms_; }
  void add_pruned(long double m) { pruned_mass_ += static_cast<double>(m); }

 private:
  SitePtr sites_;
  TruncationBudget budget_{};
  std::vector<Term> terms_;
  double pruned_mass_ = 0.0;
};

// hash-map accumulator; finish() sorts and prunes
class Accum {
 public:
  Accum(SitePtr s, TruncationBudget b) : sites_(std::move(s)), budget_(b) {}
  void add(const Key& key, cplx c) {
    if (!budget_.admits(key)) return;
    map_[key] += c;
  }
  void add_unchecked(const Key& key, cplx c) { map_[key] += c; }
  void add_series(const FormalSeries& s, cplx scale = 1.0);
  FormalSeries finish(long double prune = FormalSeries::kPrune) const;

 private:
  SitePtr sites_;
  TruncationBudget budget_;
  std::unordered_map<Key, cplx, KeyHash> map_;
};

FormalSeries operator+(const FormalSeries& a, const FormalSeries& b);
FormalSeries operator-(const FormalSeries& a, const FormalSeries& b);
FormalSeries operator*(cplx c, const FormalSeries& a);
FormalSeries product(const FormalSeries& a, const FormalSeries& b, const TruncationBudget& budget);
// max |coefficient difference| relative to max |coefficient|
long double max_abs_coeff(const FormalSeries& a);
long double max_abs_diff(const FormalSeries& a, const FormalSeries& b);

enum class Coordinates { action_angle, fourier };

FormalSeries poisson_bracket(const FormalSeries& H, const FormalSeries& F,
                             const TruncationBudget& budget,
                             Coordinates coords = Coordinates::action_angle);

// partial derivatives; mode arguments are mode ids
FormalSeries d_x(const FormalSeries& H, int b);
FormalSeries d_y(const FormalSeries& H, int b);
FormalSeries d_z(const FormalSeries& H, int mode_id);
FormalSeries d_zbar(const FormalSeries& H, int mode_id);

struct LieResult {
  FormalSeries value;
  int orders = 0;
  bool nonconvergent = false;
  double last_ratio = 0.0;
};

// H o Phi_F^1 = sum_m ad_F^m H / m!,  ad_F H = {H,F}.  order_max <= 0 picks the default.
LieResult lie_transform(const FormalSeries& H, const FormalSeries& F, int order_max,
                        const TruncationBudget& budget);
int default_lie_order(const FormalSeries& H, const FormalSeries& F, const TruncationBudget& budget);

struct TaylorSplit {
  FormalSeries R;
  FormalSeries normal;
};
// R keeps degree<=2 shapes except y^2 and y*z; the normal part keeps the k=0
// constant, k=0 y-linear and k=0 diagonal z_j zbar_j terms.
TaylorSplit taylor_truncate_R(const FormalSeries& P);
bool in_taylor_R(const Key& key);
bool in_normal_part(const Key& key);

long key_momentum(const Key& key, const SiteSet& s);
bool check_momentum_conservation(const FormalSeries& H);

MultiIndex to_multi(const Key& key, const SiteSet& s);
Key to_key(const MultiIndex& m, const SiteSet& s);
Key make_key(const SiteSet& s, std::vector<int> k, std::vector<int> i,
             const std::map<int, int>& alpha, const std::map<int, int>& beta);

// Hamiltonian vector field X_H = (sigma H_y, -sigma H_x, -i sigma_j H_zbar, i sigma_j H_z)
struct VectorField {
  SitePtr sites;
  TruncationBudget budget;
  std::vector<FormalSeries> x, y, z, zbar;  // z, zbar indexed by mode id
  static VectorField zero(SitePtr s, TruncationBudget b);
  bool is_zero() const;
};

VectorField hamiltonian_vector_field(const FormalSeries& H);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField scale(const VectorField& a, cplx c);
// [X,Y] = dX[Y] - dY[X]; for Hamiltonian fields [X_H, X_F] = X_{{H,F}}
VectorField commutator(const VectorField& X, const VectorField& Y, const TruncationBudget& budget);

// text: "k | i | alpha-pairs | beta-pairs | re im" with a header line
void write_text(std::ostream& os, const FormalSeries& s);
FormalSeries read_text(std::istream& is);
void write_binary(std::ostream& os, const FormalSeries& s);
FormalSeries read_binary(std::istream& is);

}  // namespace dnlskam
