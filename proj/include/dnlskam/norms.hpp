#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "dnlskam/series.hpp"

namespace dnlskam {

using real = long double;

// s: angle width, r: radius, p: domain regularity, q: target regularity,
// a_exp: exponential weight of l^{a,p}, a_mom: momentum weight
struct NormWeights {
  double s = 0.5;
  real r = 0.5;
  double p = 2.0;
  double q = 1.0;
  double a_exp = 0.0;
  double a_mom = 0.0;
  void validate() const;
};

struct PhasePoint {
  std::vector<cplx> x, y, z, zbar;  // z, zbar indexed by mode id
  static PhasePoint zero(const SiteSet& s);
};

// |x|_inf/s + |y|_1/r^2 + ||z||_{a,p}/r + ||zbar||_{a,p}/r
real weighted_phase_norm(const PhasePoint& v, const SiteSet& s, const NormWeights& w,
                         double reg);
real weighted_phase_norm(const PhasePoint& v, const SiteSet& s, const NormWeights& w);

// corner bound |y_b|<=r^2, |z_j|<=r e^{-a|j|}|j|^{-p}; over-estimates the sup
real majorant_norm(const VectorField& X, const NormWeights& w);
// same quantity for X_H without materializing the field
real majorant_norm_hamiltonian(const FormalSeries& H, const NormWeights& w);

// per-component majorant sums before the phase-norm weighting
struct ComponentSums {
  std::vector<real> x, y, z, zbar;
};
ComponentSums component_sums(const VectorField& X, const NormWeights& w);
real combine_sums(const ComponentSums& c, const SiteSet& s, const NormWeights& w);

// evaluate a series at a phase point (x may be complex)
cplx evaluate(const FormalSeries& H, const PhasePoint& v);
PhasePoint evaluate(const VectorField& X, const PhasePoint& v);

// grid sampled sup of the target norm over D(s,r): a lower bound of the true sup
real sampled_sup_norm(const VectorField& X, const NormWeights& w, int samples, uint64_t seed);
PhasePoint random_point_in_domain(const SiteSet& s, const NormWeights& w, std::mt19937_64& rng);

struct ParameterGrid {
  std::vector<std::vector<double>> points;
  std::vector<std::pair<int, int>> pairs;
  double diameter = 0.0;
  std::vector<double> lo, hi;  // bounding box (cell-centred grids)
  std::vector<int> shape;

  // cell-centred tensor grid on a box; pairs join axis neighbours
  static ParameterGrid box(const std::vector<double>& lo, const std::vector<double>& hi,
                           const std::vector<int>& shape);
  double cell_volume() const;
  double box_volume() const;
  size_t size() const { return points.size(); }
};

double distance(const std::vector<double>& a, const std::vector<double>& b);

// max over declared pairs of majorant(X_a - X_b)/|xi_a - xi_b|; fields indexed like grid points
real lipschitz_seminorm(const std::vector<VectorField>& X, const ParameterGrid& grid,
                        const NormWeights& w, const std::vector<char>* active = nullptr);
real lipschitz_seminorm_hamiltonian(const std::vector<FormalSeries>& H, const ParameterGrid& grid,
                                    const NormWeights& w,
                                    const std::vector<char>* active = nullptr);

}  // namespace dnlskam
