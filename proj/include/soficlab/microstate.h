#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "soficlab/sofic_map.h"
#include "soficlab/subshift.h"

namespace soficlab {

// Assignment V -> A on the vertices of a sofic model.
struct Microstate {
  std::vector<Symbol> values;

  std::size_t size() const { return values.size(); }
  Symbol operator[](Vertex v) const { return values[v]; }
  friend bool operator==(const Microstate&, const Microstate&) = default;
};

// Counts of pulled-back F-patterns (values in F's canonical order).
struct EmpiricalWindow {
  FiniteSubset window;
  std::map<std::vector<Symbol>, std::uint64_t> counts;
  std::uint64_t n = 0;

  double frequency(const std::vector<Symbol>& values) const;
};

// Convex combination of empirical windows.
struct WindowDistribution {
  FiniteSubset window;
  std::map<std::vector<Symbol>, double> probs;

  double probability(const std::vector<Symbol>& values) const;
};

// Cells sigma(g^{-1}) v for g in F, in F's canonical order.
std::vector<Vertex> pullback_cells(const SoficMap& sigma, Vertex v, const FiniteSubset& f);
// Pattern on F with value w(sigma(g^{-1}) v) at g.
Pattern pullback(const SoficMap& sigma, const Microstate& w, Vertex v, const FiniteSubset& f);
EmpiricalWindow empirical(const SoficMap& sigma, const Microstate& w, const FiniteSubset& f);
Fraction admissible_fraction(const SoficMap& sigma, const Microstate& w, const Subshift& x, const FiniteSubset& f);
WindowDistribution zeta(const std::vector<std::pair<double, EmpiricalWindow>>& weighted);

// pi_i(w)(v) = pi(xi_{sigma,v}(w))(1).
Microstate microstate_exchange(const SoficMap& sigma, const Microstate& w, const Exchange& e);

// Omega_i(delta, r): admissible fraction >= 1 - delta, |freq(x or y) - t| <=
// delta and |freq(y)/freq(x) - r| <= delta, with x, y read on F2.
struct ExchangeConstraint {
  const Subshift* subshift = nullptr;
  FiniteSubset admissibility_window;  // defaults to F2 when empty
  double delta = 0;
  double r = 0;
  double t = 1;
};

bool in_exchange_neighborhood(const SoficMap& sigma, const Microstate& w, const Exchange& e,
                              const ExchangeConstraint& c);

struct PreimageCount {
  std::uint64_t count = 0;       // K_{w'}
  std::size_t g_size = 0;        // |G(w', x)|
};

// Exact K_{w'}: number of w in Omega with pi_i(w) = w', obtained by planting
// y|_{F2} on subsets of G(w', x). |G| is capped at 24.
PreimageCount count_exchange_preimages(const SoficMap& sigma, const Microstate& w_prime, const Exchange& e,
                                       const ExchangeConstraint& c);

// Binomial sandwich for K: binom(G, floor(r* G)) and the sum of binom(G, k)
// over the delta-band of k.
struct BinomialBounds {
  double lower = 0;
  double upper = 0;
  long band_lo = 0;
  long band_hi = -1;
};
BinomialBounds exchange_count_bounds(std::size_t g_size, double r, double delta);

double binomial(std::uint64_t n, std::uint64_t k);

// Space-separated symbol names on one line.
std::string write_microstate(const Microstate& w, const std::vector<std::string>& alphabet);
Microstate read_microstate(const std::string& line, const std::vector<std::string>& alphabet);
// CSV "pattern,count,frequency".
std::string empirical_csv(const EmpiricalWindow& e, const std::vector<std::string>& alphabet);

}  // namespace soficlab
