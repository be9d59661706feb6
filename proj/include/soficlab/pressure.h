#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soficlab/measure.h"
#include "soficlab/microstate.h"
#include "soficlab/potential.h"
#include "soficlab/sofic_map.h"
#include "soficlab/subshift.h"

namespace soficlab {

struct PressureResult {
  double value = 0;              // (1/n) log Z, -inf when nothing is counted
  double log_partition = 0;      // log Z
  long double count = 0;         // microstates counted (exact) or mean weight (sampling)
  double stderr_value = 0;       // standard error of value (sampling only)
  bool exact = true;
  std::size_t n = 0;
  double delta = 0;
  FiniteSubset window;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double rejected = 0;           // fraction of samples that contributed zero
};

// Sum of exp(S(f, w)) over microstates w whose pullbacks on F are admissible
// at a fraction >= 1 - delta of vertices, by dynamic programming over the
// boundary of the assigned region (BFS vertex order).
PressureResult enumerate_pressure(const Subshift& x, const SoficMap& sigma, const LocallyConstantPotential& f,
                                  double delta, const FiniteSubset& window);

struct SisOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Sequential importance sampling of the same sum. At every vertex the
// proposal is proportional to exp(local f increment) over the symbols that
// keep the number of inadmissible windows within budget.
PressureResult estimate_pressure_sis(const Subshift& x, const SoficMap& sigma, const LocallyConstantPotential& f,
                                     double delta, const FiniteSubset& window, const SisOptions& options);

// Adds the constraint that the empirical F-distribution is within total
// variation delta of mu's F-marginal.
PressureResult pressure_measure_neighborhood(const Subshift& x, const SoficMap& sigma,
                                             const LocallyConstantPotential& f, const MeasureSpec& mu, double delta,
                                             const FiniteSubset& window);

// delta' = delta - mu(inadmissible F-patterns): a delta'-ball around mu's
// marginal forces an admissible fraction >= 1 - delta. Negative when no such
// ball exists.
double easy_direction_delta(const Subshift& x, const MeasureSpec& mu, double delta, const FiniteSubset& window);

// One row per (model, delta), models outermost.
std::vector<PressureResult> pressure_curve(const Subshift& x, const std::vector<SoficMap>& models,
                                           const LocallyConstantPotential& f, const std::vector<double>& deltas,
                                           const FiniteSubset& window);

// X x A' with |A'| = m; symbol (a, b) has index a * m + b.
Subshift product_with_full_shift(const Subshift& x, int m);
// Potential of X read on the first coordinate of X x A'.
LocallyConstantPotential lift_to_product(const LocallyConstantPotential& f, int m);

double entropy_H(double p);
// H(r/(1+r)) + r/(1+r) C.
double phat(double r, double c);
double phat_argmax(double c);
// Numerical maximizer of phat(., c) on [0, r_max].
double phat_grid_argmax(double c, double r_max = 100, int grid_points = 2001);
// log binom(n, k) - n H(k/n) with k = floor(alpha n).
double stirling_gap(std::uint64_t n, double alpha);

}  // namespace soficlab
