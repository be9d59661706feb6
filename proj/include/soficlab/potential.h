#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "soficlab/subshift.h"

namespace soficlab {

// f: X -> R depending only on x|_F. The table is indexed by the F-pattern
// code (values in the window's canonical order, first cell most
// significant, base |A|). Values are energies on the natural-log scale.
class LocallyConstantPotential {
 public:
  LocallyConstantPotential(FiniteSubset window, int symbols, std::vector<double> table);
  static LocallyConstantPotential zero(const GroupSpec& spec, int symbols);
  static LocallyConstantPotential constant(const GroupSpec& spec, int symbols, double c);
  // Single-site potential f(x) = values[x(1)].
  static LocallyConstantPotential single_site(const GroupSpec& spec, std::vector<double> values);
  static LocallyConstantPotential from_function(FiniteSubset window, int symbols,
                                                const std::function<double(const std::vector<Symbol>&)>& fn);

  const FiniteSubset& window() const { return window_; }
  int symbols() const { return symbols_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t code(const std::vector<Symbol>& values) const;
  double at_code(std::size_t code) const { return table_[code]; }
  double max_abs() const;

  // Pointwise f + c, t f + (1-t) g on the union window, etc.
  LocallyConstantPotential plus(double c) const;
  LocallyConstantPotential scaled(double t) const;
  // Same potential read on a larger window.
  LocallyConstantPotential widened(const FiniteSubset& window) const;

 private:
  FiniteSubset window_;
  int symbols_;
  std::vector<double> table_;
};

LocallyConstantPotential combine(const LocallyConstantPotential& f, const LocallyConstantPotential& g, double a,
                                 double b);  // a f + b g
double sup_distance(const LocallyConstantPotential& f, const LocallyConstantPotential& g);

double eval_potential(const LocallyConstantPotential& f, const Pattern& p);

// Finite-range interaction: Phi(p) for patterns p whose support is a
// translate of an entry's support. Entries are stored in normal form (the
// lexicographically least translate containing the identity); entries on the
// same pattern are summed.
class Interaction {
 public:
  struct Entry {
    Pattern pattern;
    double value = 0;
  };

  Interaction(GroupSpec spec, int symbols) : spec_(std::move(spec)), symbols_(symbols) {}

  void add(const Pattern& p, double value);
  const std::vector<Entry>& entries() const { return entries_; }
  const GroupSpec& spec() const { return spec_; }
  int symbols() const { return symbols_; }
  // Phi(p); zero unless p's support is a translate of an entry support.
  double value(const Pattern& p) const;
  // Distinct normal-form supports.
  std::vector<FiniteSubset> supports() const;

 private:
  GroupSpec spec_;
  int symbols_;
  std::vector<Entry> entries_;
};

// Translate of p whose support is lexicographically least among those
// containing the identity.
Pattern normal_form(const Pattern& p);

// x and y on a common window W that differ exactly on diff.
class AsymptoticPair {
 public:
  AsymptoticPair(Pattern x, Pattern y);

  const FiniteSubset& window() const { return x_.support(); }
  const Pattern& x() const { return x_; }
  const Pattern& y() const { return y_; }
  const FiniteSubset& diff() const { return diff_; }
  AsymptoticPair swapped() const { return AsymptoticPair(y_, x_); }
  AsymptoticPair shifted(const GroupElement& g) const;

  // Set when the central patterns were certified interchangeable.
  std::optional<InterchangeVerdict> etale_certificate;

 private:
  Pattern x_;
  Pattern y_;
  FiniteSubset diff_;
};

// Window needed by psi_f: diff · F^{-1} · F.
FiniteSubset psi_required_window(const FiniteSubset& diff, const FiniteSubset& f_window);

// Sum over g of f(g y) - f(g x).
double psi_f(const LocallyConstantPotential& f, const AsymptoticPair& pair);

LocallyConstantPotential f_from_interaction(const Interaction& phi);
LocallyConstantPotential h_from_interaction(const Interaction& phi);
double interaction_norm(const Interaction& phi);
double psi_interaction(const Interaction& phi, const AsymptoticPair& pair);

// Increasing sequence F_1, F_2, ... (balls by default).
class Filtration {
 public:
  static Filtration balls(GroupSpec spec);
  static Filtration explicit_sets(std::vector<FiniteSubset> sets);

  // F_n for n >= 1.
  FiniteSubset at(int n) const;
  // Largest explicit index, if the filtration is a finite list.
  std::optional<int> length() const;

 private:
  std::optional<GroupSpec> spec_;
  std::vector<FiniteSubset> sets_;
};

// sup |f(x) - f(y)| over admissible x, y with x|_S = y|_S.
double var_window(const Subshift& x, const LocallyConstantPotential& f, const FiniteSubset& s);

struct SvNorm {
  double value = 0;
  bool stabilized = false;  // f's window lies inside F_N, so later terms vanish
};

// sum_{n=1}^{N} |F_{n+1} S \ F_n S| Var_{F_n}(f).
SvNorm sv_norm_partial(const Subshift& x, const LocallyConstantPotential& f, const Filtration& filtration,
                       const FiniteSubset& s, int n_max);

}  // namespace soficlab
