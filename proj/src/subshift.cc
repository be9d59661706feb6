#include "soficlab/subshift.h"

#include <algorithm>
#include <map>

#include "soficlab/error.h"

namespace soficlab {

namespace {

constexpr double kEnumerationCap = 1 << 24;

double pattern_space_size(int symbols, std::size_t cells) {
  double s = 1;
  for (std::size_t i = 0; i < cells; ++i) s *= symbols;
  return s;
}

// Odometer over A^m, last cell fastest.
bool advance(std::vector<Symbol>& digits, int symbols) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < symbols) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- Pattern

Pattern::Pattern(FiniteSubset support, std::vector<Symbol> values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (support_.size() != values_.size()) throw PreconditionError("pattern needs exactly one value per support element");
}

Pattern Pattern::from_cells(std::vector<std::pair<GroupElement, Symbol>> cells) {
  std::sort(cells.begin(), cells.end());
  std::vector<GroupElement> elems;
  std::vector<Symbol> vals;
  for (const auto& [g, s] : cells) {
    if (!elems.empty() && elems.back() == g) {
      if (vals.back() != s) throw OverlapConflict("cell " + format_element(g) + " given two values");
      continue;
    }
    elems.push_back(g);
    vals.push_back(s);
  }
  return Pattern(FiniteSubset(std::move(elems)), std::move(vals));
}

Pattern Pattern::z_word(int lo, const std::vector<Symbol>& values) {
  std::vector<GroupElement> elems;
  for (std::size_t i = 0; i < values.size(); ++i) elems.push_back(z(lo + static_cast<int>(i)));
  return Pattern(FiniteSubset(std::move(elems)), values);
}

std::optional<Symbol> Pattern::at(const GroupElement& g) const {
  long i = support_.index_of(g);
  if (i < 0) return std::nullopt;
  return values_[i];
}

Symbol Pattern::value(const GroupElement& g) const {
  long i = support_.index_of(g);
  if (i < 0) throw WindowTooSmall("cell " + format_element(g) + " outside the pattern support");
  return values_[i];
}

Pattern Pattern::restrict_to(const FiniteSubset& f) const {
  std::vector<Symbol> vals;
  vals.reserve(f.size());
  for (const auto& g : f) vals.push_back(value(g));
  return Pattern(f, std::move(vals));
}

Pattern shift_pattern(const GroupElement& g, const Pattern& p) {
  std::vector<std::pair<GroupElement, Symbol>> cells;
  for (std::size_t i = 0; i < p.size(); ++i) cells.emplace_back(mul(g, p.support()[i]), p.values()[i]);
  return Pattern::from_cells(std::move(cells));
}

Pattern concatenate(const Pattern& p, const Pattern& q) {
  std::vector<std::pair<GroupElement, Symbol>> cells;
  for (std::size_t i = 0; i < p.size(); ++i) cells.emplace_back(p.support()[i], p.values()[i]);
  for (std::size_t i = 0; i < q.size(); ++i) cells.emplace_back(q.support()[i], q.values()[i]);
  return Pattern::from_cells(std::move(cells));
}

std::vector<GroupElement> occurrences(const Pattern& z, const Pattern& pat) {
  std::vector<GroupElement> out;
  if (pat.size() == 0) return out;
  const GroupElement anchor_inv = inverse(pat.support()[0]);
  for (const auto& s : z.support()) {
    GroupElement g = mul(s, anchor_inv);
    bool match = true;
    for (std::size_t i = 0; i < pat.size() && match; ++i) {
      auto v = z.at(mul(g, pat.support()[i]));
      match = v && *v == pat.values()[i];
    }
    if (match) out.push_back(std::move(g));
  }
  return out;
}

std::string format_pattern(const Pattern& p, const std::vector<std::string>& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Symbol s = p.values()[i];
    out += "(" + format_element(p.support()[i]) + ":" +
           (s >= 0 && s < static_cast<Symbol>(alphabet.size()) ? alphabet[s] : std::to_string(s)) + ")";
  }
  return out;
}

// --------------------------------------------------------------- Subshift

namespace {

bool oracle_admits(OracleKind kind, const Pattern& p) {
  if (kind == OracleKind::Full) return true;
  return std::count_if(p.values().begin(), p.values().end(), [](Symbol s) { return s != 0; }) <= 1;
}

bool forbidden_free(const std::vector<Pattern>& forbidden, const Pattern& p) {
  for (const auto& q : forbidden) {
    const GroupElement anchor_inv = inverse(q.support()[0]);
    for (const auto& s : p.support()) {
      GroupElement g = mul(s, anchor_inv);
      bool match = true;
      for (std::size_t i = 0; i < q.size() && match; ++i) {
        auto v = p.at(mul(g, q.support()[i]));
        match = v && *v == q.values()[i];
      }
      if (match) return false;
    }
  }
  return true;
}

std::shared_ptr<const ZGraph> build_z_graph(const std::vector<Pattern>& forbidden, int symbols, int block) {
  auto g = std::make_shared<ZGraph>();
  g->block = std::max(block, 1);
  g->symbols = symbols;
  std::size_t states = 1;
  for (int i = 0; i < g->block; ++i) states *= symbols;
  if (static_cast<double>(states) * symbols > kEnumerationCap) throw SizeLimit("Z recoding has too many states");
  g->states = states;
  g->state_ok.assign(states, 0);
  g->edge_ok.assign(states * symbols, 0);
  auto digits_of = [&](std::size_t s) {
    std::vector<Symbol> d(g->block);
    for (int i = g->block - 1; i >= 0; --i) {
      d[i] = static_cast<Symbol>(s % symbols);
      s /= symbols;
    }
    return d;
  };
  for (std::size_t s = 0; s < states; ++s) {
    auto d = digits_of(s);
    g->state_ok[s] = forbidden_free(forbidden, Pattern::z_word(0, d));
    if (!g->state_ok[s]) continue;
    d.push_back(0);
    for (int a = 0; a < symbols; ++a) {
      d.back() = a;
      g->edge_ok[s * symbols + a] = forbidden_free(forbidden, Pattern::z_word(0, d));
    }
  }
  // Prune states without successors (resp. predecessors) until stable.
  g->forward = g->state_ok;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < states; ++s) {
      if (!g->forward[s]) continue;
      bool any = false;
      for (int a = 0; a < symbols && !any; ++a)
        any = g->edge_ok[s * symbols + a] && g->forward[g->next_state(s, a)];
      if (!any) g->forward[s] = 0, changed = true;
    }
  }
  g->backward = g->state_ok;
  const std::size_t high = states / symbols;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < states; ++s) {
      if (!g->backward[s]) continue;
      const int last = static_cast<int>(s % symbols);
      bool any = false;
      for (int b = 0; b < symbols && !any; ++b) {
        std::size_t p = b * high + s / symbols;
        any = g->backward[p] && g->edge_ok[p * symbols + last];
      }
      if (!any) g->backward[s] = 0, changed = true;
    }
  }
  return g;
}

}  // namespace

Subshift Subshift::forbidden(GroupSpec spec, std::vector<std::string> alphabet, std::vector<Pattern> patterns) {
  if (alphabet.empty()) throw PreconditionError("alphabet must be nonempty");
  Subshift x(std::move(spec), std::move(alphabet));
  for (const auto& p : patterns) {
    if (p.size() == 0) throw PreconditionError("forbidden patterns need nonempty support");
    if (!p.support()[0].belongs_to(x.spec_)) throw SpecMismatch("forbidden pattern outside the subshift's group");
    for (Symbol s : p.values())
      if (s < 0 || s >= x.alphabet_size()) throw PreconditionError("forbidden pattern uses an unknown symbol");
  }
  x.forbidden_ = std::move(patterns);
  if (x.over_z()) {
    for (const auto& p : x.forbidden_)
      x.z_range_ = std::max(x.z_range_, p.support().elements().back().data()[0] - p.support()[0].data()[0]);
    x.z_graph_ = build_z_graph(x.forbidden_, x.alphabet_size(), x.z_range_);
  }
  return x;
}

Subshift Subshift::oracle(GroupSpec spec, std::vector<std::string> alphabet, OracleKind kind) {
  if (alphabet.empty()) throw PreconditionError("alphabet must be nonempty");
  Subshift x(std::move(spec), std::move(alphabet));
  x.oracle_ = kind;
  return x;
}

Subshift Subshift::golden_mean() {
  return forbidden(GroupSpec::lattice(1), {"0", "1"}, {Pattern::z_word(0, {1, 1})});
}

Subshift Subshift::sunny_side_up(GroupSpec spec) { return oracle(std::move(spec), {"0", "1"}, OracleKind::SunnySideUp); }

bool Subshift::is_full() const {
  if (oracle_) return *oracle_ == OracleKind::Full;
  return forbidden_.empty();
}

int Subshift::symbol_index(const std::string& name) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), name);
  return it == alphabet_.end() ? -1 : static_cast<int>(it - alphabet_.begin());
}

bool Subshift::admissibility_exact() const { return oracle_.has_value() || is_full() || over_z(); }

std::optional<int> Subshift::exact_interchange_radius() const {
  if (is_full()) return 0;
  if (oracle_) return 1;  // sunny-side-up: one annulus cell witnesses any disagreement
  if (over_z()) return z_range_;
  return std::nullopt;
}

std::shared_ptr<const ZGraph> make_z_graph(const Subshift& x, int block) {
  if (!x.over_z() || x.is_oracle()) throw UnsupportedShape("Z recoding needs an SFT over Z");
  if (block < std::max(x.z_range(), 1)) throw PreconditionError("block shorter than the subshift's range");
  return build_z_graph(x.forbidden_patterns(), x.alphabet_size(), block);
}

// ------------------------------------------------------------ admissibility

bool locally_admissible(const Subshift& x, const Pattern& p) {
  if (x.oracle_kind()) return oracle_admits(*x.oracle_kind(), p);
  return forbidden_free(x.forbidden_patterns(), p);
}

bool extendable_z(const Subshift& x, const Pattern& p) {
  if (x.oracle_kind()) return oracle_admits(*x.oracle_kind(), p);
  if (!x.over_z()) throw UnsupportedShape("extendability oracle is only available over Z");
  const ZGraph& g = *x.z_graph();
  if (p.size() == 0) {
    for (std::size_t s = 0; s < g.states; ++s)
      if (g.forward[s] && g.backward[s]) return true;
    return false;
  }
  const int lo = p.support()[0].data()[0];
  const int hi = std::max(p.support().elements().back().data()[0], lo + g.block - 1);
  auto fixed = [&](int pos) -> Symbol {
    auto v = p.at(z(pos));
    return v ? *v : -1;
  };
  std::vector<char> cur(g.states, 0);
  bool any = false;
  for (std::size_t s = 0; s < g.states; ++s) {
    if (!g.backward[s]) continue;
    std::size_t t = s;
    bool ok = true;
    for (int i = g.block - 1; i >= 0 && ok; --i) {
      Symbol want = fixed(lo + i);
      ok = want < 0 || want == static_cast<Symbol>(t % g.symbols);
      t /= g.symbols;
    }
    if (ok) cur[s] = 1, any = true;
  }
  for (int pos = lo + g.block; pos <= hi && any; ++pos) {
    std::vector<char> next(g.states, 0);
    any = false;
    const Symbol want = fixed(pos);
    for (std::size_t s = 0; s < g.states; ++s) {
      if (!cur[s]) continue;
      for (int a = 0; a < g.symbols; ++a) {
        if (want >= 0 && a != want) continue;
        if (!g.edge_ok[s * g.symbols + a]) continue;
        next[g.next_state(s, a)] = 1;
        any = true;
      }
    }
    cur = std::move(next);
  }
  for (std::size_t s = 0; s < g.states; ++s)
    if (cur[s] && g.forward[s]) return true;
  return false;
}

bool globally_admissible_Z(const Subshift& x, const Pattern& p) {
  if (!x.over_z()) throw UnsupportedShape("globally_admissible_Z needs a subshift over Z");
  if (p.size() > 0) {
    const int lo = p.support()[0].data()[0];
    const int hi = p.support().elements().back().data()[0];
    if (hi - lo + 1 != static_cast<int>(p.size())) throw UnsupportedShape("pattern support is not an interval");
  }
  return extendable_z(x, p);
}

bool admissible(const Subshift& x, const Pattern& p) {
  if (x.oracle_kind() || x.over_z()) return extendable_z(x, p);
  return locally_admissible(x, p);
}

std::vector<Pattern> admissible_patterns(const Subshift& x, const FiniteSubset& f) {
  if (pattern_space_size(x.alphabet_size(), f.size()) > kEnumerationCap)
    throw SizeLimit("too many patterns on a window of size " + std::to_string(f.size()));
  std::vector<Pattern> out;
  std::vector<Symbol> digits(f.size(), 0);
  do {
    Pattern p(f, digits);
    if (admissible(x, p)) out.push_back(std::move(p));
  } while (advance(digits, x.alphabet_size()));
  return out;
}

// --------------------------------------------------------- interchangeability

std::string to_string(InterchangeVerdict::Outcome o) {
  switch (o) {
    case InterchangeVerdict::Outcome::Yes: return "yes";
    case InterchangeVerdict::Outcome::No: return "no";
    case InterchangeVerdict::Outcome::Unknown: return "unknown";
  }
  return "unknown";
}

InterchangeVerdict interchangeable(const Subshift& x, const Pattern& p, const Pattern& q, int annulus_radius) {
  if (p.support() != q.support()) throw PreconditionError("interchangeable needs patterns with equal supports");
  if (p == q) return {InterchangeVerdict::Outcome::Yes, std::nullopt};
  if (x.is_full()) return {InterchangeVerdict::Outcome::Yes, std::nullopt};
  const FiniteSubset outer = set_product(p.support(), ball(x.spec(), annulus_radius));
  const FiniteSubset annulus = set_difference(outer, p.support());
  if (pattern_space_size(x.alphabet_size(), annulus.size()) > kEnumerationCap)
    throw SizeLimit("annulus of " + std::to_string(annulus.size()) + " cells is too large to enumerate");
  const bool exact = x.admissibility_exact();
  // Exactly one of p∨w, q∨w admissible implies w itself is admissible, so
  // the annulus pattern needs no separate check.
  std::vector<Symbol> digits(annulus.size(), 0);
  do {
    Pattern w(annulus, digits);
    const bool a = admissible(x, concatenate(p, w));
    const bool b = admissible(x, concatenate(q, w));
    if (a != b) {
      if (exact) return {InterchangeVerdict::Outcome::No, w};
      return {InterchangeVerdict::Outcome::Unknown, w};
    }
  } while (advance(digits, x.alphabet_size()));
  auto radius = x.exact_interchange_radius();
  if (exact && radius && annulus_radius >= *radius) return {InterchangeVerdict::Outcome::Yes, std::nullopt};
  return {InterchangeVerdict::Outcome::Unknown, std::nullopt};
}

MemorySearchResult tmp_memory_search(const Subshift& x, const FiniteSubset& a, int max_radius) {
  if (a.empty()) throw PreconditionError("memory search needs a nonempty set");
  MemorySearchResult result;
  if (x.is_full()) {
    result.memory_set = a;
    result.radius = 0;
    return result;
  }
  const int check_radius = x.exact_interchange_radius().value_or(std::max(x.z_range(), 1));
  for (int r = 0; r <= max_radius; ++r) {
    result.radius = r;
    result.failing_pair.reset();
    result.unknown = false;
    const FiniteSubset b = set_product(a, ball(x.spec(), r));
    const FiniteSubset context = set_difference(b, a);
    std::map<Pattern, std::vector<Pattern>> groups;
    for (auto& p : admissible_patterns(x, b)) groups[p.restrict_to(context)].push_back(std::move(p));
    bool all_yes = true;
    for (const auto& [ctx, members] : groups) {
      for (std::size_t i = 0; i < members.size() && all_yes; ++i)
        for (std::size_t j = i + 1; j < members.size() && all_yes; ++j) {
          auto verdict = interchangeable(x, members[i], members[j], check_radius);
          if (!verdict.yes()) {
            all_yes = false;
            result.unknown = verdict.unknown();
            result.failing_pair = std::make_pair(members[i], members[j]);
          }
        }
      if (!all_yes) break;
    }
    if (all_yes) {
      result.memory_set = b;
      return result;
    }
  }
  return result;
}

// ------------------------------------------------------------------ overlaps

namespace {

// (g b)|_I == a|_I where (g b)(h) = b(g^{-1} h).
bool shifted_agrees(const GroupElement& g, const Pattern& b, const Pattern& a, const FiniteSubset& cells) {
  const GroupElement ginv = inverse(g);
  for (const auto& h : cells)
    if (b.value(mul(ginv, h)) != a.value(h)) return false;
  return true;
}

std::vector<GroupElement> nontrivial(const FiniteSubset& s) {
  std::vector<GroupElement> out;
  for (const auto& g : s)
    if (!g.is_identity()) out.push_back(g);
  return out;
}

}  // namespace

bool has_trivial_overlaps(const Pattern& x, const Pattern& y, const FiniteSubset& f1, const FiniteSubset& f2) {
  if (x.support() != f2 || y.support() != f2) throw PreconditionError("overlap check needs patterns supported on F2");
  if (!f1.is_subset_of(f2)) throw PreconditionError("overlap check needs F1 inside F2");
  for (const auto& g : nontrivial(set_product(f2, set_inverse(f1)))) {
    const FiniteSubset cells = set_intersection(f2, translate(g, f2));
    for (const Pattern* a : {&x, &y})
      for (const Pattern* b : {&x, &y})
        if (shifted_agrees(g, *b, *a, cells)) return false;
  }
  return true;
}

bool is_self_overlapping(const Pattern& x, const FiniteSubset& f1, const FiniteSubset& f2) {
  if (!f1.is_subset_of(f2)) throw PreconditionError("self-overlap check needs F1 inside F2");
  const FiniteSubset ring = set_difference(f2, f1);
  for (const auto& g : nontrivial(set_product(f2, set_inverse(f1)))) {
    const FiniteSubset cells = set_intersection(ring, translate(g, ring));
    if (shifted_agrees(g, x, x, cells)) return true;
  }
  return false;
}

// ------------------------------------------------------------------ exchange

void validate_exchange(const Exchange& e) {
  if (!e.f1.is_subset_of(e.f2)) throw PreconditionError("exchange needs F1 inside F2");
  if (e.x.support() != e.f2 || e.y.support() != e.f2) throw PreconditionError("exchange patterns must live on F2");
  const FiniteSubset ring = set_difference(e.f2, e.f1);
  if (e.x.restrict_to(ring) != e.y.restrict_to(ring)) throw PreconditionError("x and y must agree on F2 \\ F1");
  // Two matches h != h' at the same cell force (gamma y) = y on F2 ∩ gamma F2
  // with gamma = h' h^{-1}; excluding that makes the rule single-valued.
  for (const auto& gamma : nontrivial(set_product(e.f1, set_inverse(e.f1)))) {
    const FiniteSubset cells = set_intersection(e.f2, translate(gamma, e.f2));
    if (shifted_agrees(gamma, e.y, e.y, cells))
      throw PreconditionError("y overlaps itself within F1 F1^-1; the exchange rule is ambiguous");
  }
}

FiniteSubset exchange_deflate(const Exchange& e, const FiniteSubset& w) {
  const FiniteSubset reach = set_product(set_inverse(e.f1), e.f2);
  std::vector<GroupElement> out;
  for (const auto& g : w)
    if (translate(g, reach).is_subset_of(w)) out.push_back(g);
  return FiniteSubset(std::move(out));
}

Pattern exchange_map_apply(const Exchange& e, const Pattern& z) {
  validate_exchange(e);
  const FiniteSubset inner = exchange_deflate(e, z.support());
  if (inner.empty()) throw WindowTooSmall("window too small for the exchange map");
  std::vector<Symbol> out;
  out.reserve(inner.size());
  for (const auto& g : inner) {
    Symbol v = z.value(g);
    for (const auto& h : e.f1) {
      const GroupElement base = mul(g, inverse(h));
      bool match = true;
      for (std::size_t i = 0; i < e.f2.size() && match; ++i) match = z.value(mul(base, e.f2[i])) == e.y.values()[i];
      if (match) {
        v = e.x.value(h);
        break;
      }
    }
    out.push_back(v);
  }
  return Pattern(inner, std::move(out));
}

}  // namespace soficlab
