#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soficlab/measure.h"
#include "soficlab/potential.h"
#include "soficlab/sofic_map.h"
#include "soficlab/subshift.h"

namespace soficlab {

struct PotentialLine {
  FiniteSubset window;
  double default_value = 0;
  std::map<std::vector<Symbol>, double> values;
  friend bool operator==(const PotentialLine&, const PotentialLine&) = default;
};

struct MeasureLine {
  enum class Kind { Bernoulli, Markov, Haar, Empirical };
  Kind kind = Kind::Bernoulli;
  std::vector<double> numbers;  // probabilities, or k*k transition entries
  int markov_states = 0;
  std::string file;             // empirical microstate file
  FiniteSubset window;          // empirical window
  friend bool operator==(const MeasureLine&, const MeasureLine&) = default;
};

struct ModelLine {
  bool torus = true;
  std::vector<int> sides;                // one torus, or one random size
  std::optional<std::pair<int, int>> range;  // "a..b": one model per size
  std::uint64_t seed = 0;
  friend bool operator==(const ModelLine&, const ModelLine&) = default;
};

struct ExperimentConfig {
  std::optional<GroupSpec> group;
  std::vector<std::string> alphabet;
  std::vector<Pattern> forbidden;
  std::optional<OracleKind> oracle;
  std::optional<PotentialLine> potential;
  std::vector<std::pair<Pattern, double>> interactions;
  std::optional<MeasureLine> measure;
  std::vector<ModelLine> models;
  std::vector<double> deltas;
  std::optional<FiniteSubset> window;
  std::optional<int> window_radius;
  std::optional<std::size_t> samples;
  std::optional<std::string> mode;  // exact | sis
  std::optional<Pattern> pattern_p;
  std::optional<Pattern> pattern_q;
  std::optional<FiniteSubset> memory_set;
  std::optional<int> memory_max_radius;
  std::optional<int> radius;
  std::optional<std::string> family;
  std::vector<double> phat_c;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Line grammar, one directive per line, '#' starts a comment. Throws
// ParseError with the 1-based line and column of the offending token.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& c);

Subshift build_subshift(const ExperimentConfig& c);
// Table potential plus the potential of the interaction lines; zero if none.
LocallyConstantPotential build_potential(const ExperimentConfig& c);
// base_dir resolves relative empirical microstate files.
std::optional<MeasureSpec> build_measure(const ExperimentConfig& c, const std::string& base_dir = ".");
std::vector<SoficMap> build_models(const ExperimentConfig& c);
// Explicit window, else ball(window radius), else ball(1).
FiniteSubset build_window(const ExperimentConfig& c);

std::string fnv1a_hex(const std::string& text);

}  // namespace soficlab
