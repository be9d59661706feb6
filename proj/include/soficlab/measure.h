#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "soficlab/microstate.h"
#include "soficlab/potential.h"

namespace soficlab {

struct Bernoulli {
  std::vector<double> probs;
};

// Stationary Markov chain on the alphabet, as a measure on A^Z.
struct MarkovZ {
  Eigen::MatrixXd transition;
  Eigen::RowVectorXd stationary;
};

// Haar measure of a group shift over Z whose alphabet is Z/k.
struct HaarGroupShift {
  Subshift subshift;
};

struct EmpiricalMeasure {
  EmpiricalWindow window;
};

using MeasureSpec = std::variant<Bernoulli, MarkovZ, HaarGroupShift, EmpiricalMeasure>;

MeasureSpec make_bernoulli(std::vector<double> probs);
// Bernoulli with weights proportional to exp(f(a)) for a single-site f.
MeasureSpec gibbs_bernoulli(const LocallyConstantPotential& f);
MeasureSpec make_markov(Eigen::MatrixXd transition);
// Throws NotGroupShift unless cellwise addition mod |A| preserves X.
MeasureSpec make_haar(const Subshift& x);
// Maximal-entropy Markov measure of a range <= 1 SFT over Z.
MeasureSpec parry_measure(const Subshift& x);

bool is_group_shift(const Subshift& x);

double cylinder_prob(const MeasureSpec& mu, const Pattern& p);
// Distribution of mu on all patterns of window f.
WindowDistribution marginal(const MeasureSpec& mu, const FiniteSubset& f, int symbols);

struct GibbsReport {
  double ratio = 0;     // mu([y]) / mu([x])
  double cocycle = 0;   // exp(psi_f(x, y))
  std::optional<double> residual;  // empty when mu([x]) = 0
  bool singular = false;
  bool etale = false;   // pair carries a Yes interchange certificate
};

GibbsReport gibbs_ratio_residual(const MeasureSpec& mu, const LocallyConstantPotential& f,
                                 const AsymptoticPair& pair);

// Certify (x, y) as an etale pair: x|_W and y|_W interchangeable.
InterchangeVerdict certify_etale(const Subshift& x, const AsymptoticPair& pair);
// Ordered pairs of distinct admissible patterns on ball(radius) whose window
// patterns are certified interchangeable.
std::vector<AsymptoticPair> etale_pairs(const Subshift& x, int radius);

// Transfer matrix for a Z SFT with edge weights exp(f); rows and columns are
// the essential states of the recoding.
Eigen::MatrixXd weighted_transfer_matrix(const Subshift& x, const LocallyConstantPotential& f);
double spectral_radius(const Eigen::MatrixXd& m);
double transfer_pressure_Z(const Subshift& x, const LocallyConstantPotential& f);

double measure_entropy(const MeasureSpec& mu);
double integral(const MeasureSpec& mu, const LocallyConstantPotential& f);

// Parametric family of Markov measures on a box of parameters; make returns
// nothing for infeasible parameter tuples.
struct MeasureFamily {
  std::string name;
  std::vector<std::pair<double, double>> box;
  std::function<std::optional<MeasureSpec>(std::span<const double>)> make;
};

// P(0->1) = p, P(1->0) = 1 on the golden mean shift.
MeasureFamily golden_mean_family();
// Bernoulli(p_0, ..., p_{k-2}, 1 - sum).
MeasureFamily bernoulli_family(int symbols);

struct EquilibriumResult {
  std::vector<double> params;
  MeasureSpec measure;
  double value = 0;  // h(mu) + integral of f
};

EquilibriumResult equilibrium_search_Z(const Subshift& x, const LocallyConstantPotential& f,
                                       const MeasureFamily& family, int grid_points = 41, double tol = 1e-10);

std::vector<Pattern> homoclinic_elements(const Subshift& x, int radius);
double haar_is_gibbs_check(const Subshift& x, int radius);

}  // namespace soficlab
