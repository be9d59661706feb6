#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soficlab/group.h"

namespace soficlab {

using Symbol = int;

// Finite partial configuration: a value for every element of its support,
// stored in the support's canonical order.
class Pattern {
 public:
  Pattern() = default;
  Pattern(FiniteSubset support, std::vector<Symbol> values);
  // From (element, symbol) cells in any order; duplicates must agree.
  static Pattern from_cells(std::vector<std::pair<GroupElement, Symbol>> cells);
  // Z pattern with values[i] at position lo + i.
  static Pattern z_word(int lo, const std::vector<Symbol>& values);

  const FiniteSubset& support() const { return support_; }
  const std::vector<Symbol>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::optional<Symbol> at(const GroupElement& g) const;
  Symbol value(const GroupElement& g) const;  // throws WindowTooSmall when absent
  Pattern restrict_to(const FiniteSubset& f) const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend auto operator<=>(const Pattern& a, const Pattern& b) {
    if (auto c = a.support_ <=> b.support_; c != 0) return c;
    return a.values_ <=> b.values_;
  }

 private:
  FiniteSubset support_;
  std::vector<Symbol> values_;
};

// (g p)(g h) = p(h); support g F.
Pattern shift_pattern(const GroupElement& g, const Pattern& p);
// Union of two patterns that agree on the intersection of their supports.
Pattern concatenate(const Pattern& p, const Pattern& q);
// Left translates g with (g^{-1} z)|_F = pat, i.e. z(g k) = pat(k) for k in F,
// where g ranges over elements with g F inside supp(z).
std::vector<GroupElement> occurrences(const Pattern& z, const Pattern& pat);

// "(<offset>:<symbol>)(<offset>:<symbol>)..." using symbol names.
std::string format_pattern(const Pattern& p, const std::vector<std::string>& alphabet);

enum class OracleKind { Full, SunnySideUp };

struct ZGraph;

// Subshift given by forbidden patterns or by a named admissibility oracle.
class Subshift {
 public:
  static Subshift forbidden(GroupSpec spec, std::vector<std::string> alphabet, std::vector<Pattern> patterns);
  static Subshift oracle(GroupSpec spec, std::vector<std::string> alphabet, OracleKind kind);
  static Subshift full(GroupSpec spec, std::vector<std::string> alphabet) {
    return forbidden(std::move(spec), std::move(alphabet), {});
  }
  // Golden mean shift over Z: alphabet {0,1}, forbid two adjacent 1s.
  static Subshift golden_mean();
  static Subshift sunny_side_up(GroupSpec spec);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int alphabet_size() const { return static_cast<int>(alphabet_.size()); }
  bool is_oracle() const { return oracle_.has_value(); }
  std::optional<OracleKind> oracle_kind() const { return oracle_; }
  const std::vector<Pattern>& forbidden_patterns() const { return forbidden_; }
  bool is_full() const;
  bool over_z() const { return spec_.is_lattice() && spec_.rank() == 1; }
  // Largest forbidden-support diameter over Z (0 for the full shift).
  int z_range() const { return z_range_; }
  const ZGraph* z_graph() const { return z_graph_.get(); }
  int symbol_index(const std::string& name) const;  // -1 when absent

  // Whether admissible() decides global admissibility exactly.
  bool admissibility_exact() const;
  // Annulus radius from which interchange checks are exact, if any.
  std::optional<int> exact_interchange_radius() const;

 private:
  Subshift(GroupSpec spec, std::vector<std::string> alphabet) : spec_(std::move(spec)), alphabet_(std::move(alphabet)) {}

  GroupSpec spec_;
  std::vector<std::string> alphabet_;
  std::vector<Pattern> forbidden_;
  std::optional<OracleKind> oracle_;
  int z_range_ = 0;
  std::shared_ptr<const ZGraph> z_graph_;
};

// Range-m recoding of a Z SFT: states are locally admissible words of length
// m, edges are locally admissible words of length m+1.
struct ZGraph {
  int block = 1;  // m
  int symbols = 2;
  std::size_t states = 0;
  std::vector<char> state_ok;
  std::vector<char> edge_ok;   // index state * symbols + next symbol
  std::vector<char> forward;   // state starts an infinite forward path
  std::vector<char> backward;  // state ends an infinite backward path
  std::size_t next_state(std::size_t s, int a) const { return (s * symbols + a) % states; }
};

// Recoding with a requested block length (>= the subshift's range).
std::shared_ptr<const ZGraph> make_z_graph(const Subshift& x, int block);

bool locally_admissible(const Subshift& x, const Pattern& p);
// Whether p occurs in some configuration of a Z SFT (any finite support).
bool extendable_z(const Subshift& x, const Pattern& p);
// Exact membership in P_F(X) for interval supports over Z.
bool globally_admissible_Z(const Subshift& x, const Pattern& p);
// Best available decision: exact over Z and for oracles, local otherwise.
bool admissible(const Subshift& x, const Pattern& p);

// All admissible patterns on f (exhaustive; capped).
std::vector<Pattern> admissible_patterns(const Subshift& x, const FiniteSubset& f);

struct InterchangeVerdict {
  enum class Outcome { Yes, No, Unknown };
  Outcome outcome = Outcome::Unknown;
  std::optional<Pattern> witness;  // annulus pattern for No
  bool yes() const { return outcome == Outcome::Yes; }
  bool no() const { return outcome == Outcome::No; }
  bool unknown() const { return outcome == Outcome::Unknown; }
};

std::string to_string(InterchangeVerdict::Outcome o);

InterchangeVerdict interchangeable(const Subshift& x, const Pattern& p, const Pattern& q, int annulus_radius);

struct MemorySearchResult {
  std::optional<FiniteSubset> memory_set;
  int radius = -1;  // radius of memory_set, or last radius tried
  // Pair that failed at the last radius tried (None case).
  std::optional<std::pair<Pattern, Pattern>> failing_pair;
  bool unknown = false;  // some pair check was inconclusive
};

MemorySearchResult tmp_memory_search(const Subshift& x, const FiniteSubset& a, int max_radius);

// (g y)|_{F2 ∩ gF2} != x|_{F2 ∩ gF2} for every g in F2 F1^{-1} \ {1} and
// every ordered pair from {x, y}.
bool has_trivial_overlaps(const Pattern& x, const Pattern& y, const FiniteSubset& f1, const FiniteSubset& f2);
bool is_self_overlapping(const Pattern& x, const FiniteSubset& f1, const FiniteSubset& f2);

// Data of the pattern-exchange endomorphism: occurrences of y|_{F2} are
// replaced by x|_{F2}; x and y agree off F1.
struct Exchange {
  Pattern x;
  Pattern y;
  FiniteSubset f1;
  FiniteSubset f2;
};

// Throws PreconditionError unless the rule is well defined (see exchange.cc).
void validate_exchange(const Exchange& e);
// Cells g with g F1^{-1} F2 inside w: where the rule can be evaluated.
FiniteSubset exchange_deflate(const Exchange& e, const FiniteSubset& w);
Pattern exchange_map_apply(const Exchange& e, const Pattern& z);

}  // namespace soficlab
