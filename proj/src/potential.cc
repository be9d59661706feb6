#include "soficlab/potential.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "soficlab/error.h"

namespace soficlab {

namespace {

std::size_t table_size(int symbols, std::size_t cells) {
  std::size_t s = 1;
  for (std::size_t i = 0; i < cells; ++i) {
    s *= static_cast<std::size_t>(symbols);
    if (s > (std::size_t{1} << 26)) throw SizeLimit("potential window too large for a dense table");
  }
  return s;
}

std::vector<Symbol> decode(std::size_t code, int symbols, std::size_t cells) {
  std::vector<Symbol> d(cells);
  for (std::size_t i = cells; i-- > 0;) {
    d[i] = static_cast<Symbol>(code % symbols);
    code /= symbols;
  }
  return d;
}

}  // namespace

LocallyConstantPotential::LocallyConstantPotential(FiniteSubset window, int symbols, std::vector<double> table)
    : window_(std::move(window)), symbols_(symbols), table_(std::move(table)) {
  if (symbols_ < 1) throw PreconditionError("potential needs a nonempty alphabet");
  if (table_.size() != table_size(symbols_, window_.size()))
    throw PreconditionError("potential table must cover every window pattern");
}

LocallyConstantPotential LocallyConstantPotential::zero(const GroupSpec& spec, int symbols) {
  return constant(spec, symbols, 0.0);
}

LocallyConstantPotential LocallyConstantPotential::constant(const GroupSpec& spec, int symbols, double c) {
  return LocallyConstantPotential(FiniteSubset{GroupElement::identity(spec)}, symbols,
                                  std::vector<double>(symbols, c));
}

LocallyConstantPotential LocallyConstantPotential::single_site(const GroupSpec& spec, std::vector<double> values) {
  const int k = static_cast<int>(values.size());
  return LocallyConstantPotential(FiniteSubset{GroupElement::identity(spec)}, k, std::move(values));
}

LocallyConstantPotential LocallyConstantPotential::from_function(
    FiniteSubset window, int symbols, const std::function<double(const std::vector<Symbol>&)>& fn) {
  const std::size_t size = table_size(symbols, window.size());
  std::vector<double> table(size);
  for (std::size_t c = 0; c < size; ++c) table[c] = fn(decode(c, symbols, window.size()));
  return LocallyConstantPotential(std::move(window), symbols, std::move(table));
}

std::size_t LocallyConstantPotential::code(const std::vector<Symbol>& values) const {
  std::size_t c = 0;
  for (Symbol s : values) c = c * symbols_ + static_cast<std::size_t>(s);
  return c;
}

double LocallyConstantPotential::max_abs() const {
  double m = 0;
  for (double v : table_) m = std::max(m, std::abs(v));
  return m;
}

LocallyConstantPotential LocallyConstantPotential::plus(double c) const {
  auto t = table_;
  for (double& v : t) v += c;
  return LocallyConstantPotential(window_, symbols_, std::move(t));
}

LocallyConstantPotential LocallyConstantPotential::scaled(double s) const {
  auto t = table_;
  for (double& v : t) v *= s;
  return LocallyConstantPotential(window_, symbols_, std::move(t));
}

LocallyConstantPotential LocallyConstantPotential::widened(const FiniteSubset& window) const {
  if (!window_.is_subset_of(window)) throw PreconditionError("widened window must contain the original window");
  std::vector<std::size_t> pos;
  for (const auto& g : window_) pos.push_back(static_cast<std::size_t>(window.index_of(g)));
  return from_function(window, symbols_, [&](const std::vector<Symbol>& vals) {
    std::size_t c = 0;
    for (std::size_t p : pos) c = c * symbols_ + static_cast<std::size_t>(vals[p]);
    return table_[c];
  });
}

LocallyConstantPotential combine(const LocallyConstantPotential& f, const LocallyConstantPotential& g, double a,
                                 double b) {
  if (f.symbols() != g.symbols()) throw PreconditionError("potentials over different alphabets");
  const FiniteSubset w = set_union(f.window(), g.window());
  auto fw = f.widened(w);
  auto gw = g.widened(w);
  std::vector<double> t(fw.table().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = a * fw.table()[i] + b * gw.table()[i];
  return LocallyConstantPotential(w, f.symbols(), std::move(t));
}

double sup_distance(const LocallyConstantPotential& f, const LocallyConstantPotential& g) {
  auto d = combine(f, g, 1.0, -1.0);
  return d.max_abs();
}

double eval_potential(const LocallyConstantPotential& f, const Pattern& p) {
  if (!f.window().is_subset_of(p.support())) throw WindowTooSmall("pattern does not cover the potential window");
  std::size_t c = 0;
  for (const auto& g : f.window()) c = c * f.symbols() + static_cast<std::size_t>(p.value(g));
  return f.at_code(c);
}

// ------------------------------------------------------------- interactions

Pattern normal_form(const Pattern& p) {
  if (p.size() == 0) throw PreconditionError("interaction entries need nonempty support");
  std::optional<Pattern> best;
  for (const auto& s : p.support()) {
    Pattern t = shift_pattern(inverse(s), p);
    if (!best || t.support() < best->support()) best = std::move(t);
  }
  return *best;
}

void Interaction::add(const Pattern& p, double value) {
  Pattern nf = normal_form(p);
  if (!nf.support()[0].belongs_to(spec_)) throw SpecMismatch("interaction entry outside the group");
  for (auto& e : entries_)
    if (e.pattern == nf) {
      e.value += value;
      return;
    }
  entries_.push_back({std::move(nf), value});
}

double Interaction::value(const Pattern& p) const {
  if (p.size() == 0) return 0;
  const Pattern nf = normal_form(p);
  for (const auto& e : entries_)
    if (e.pattern == nf) return e.value;
  return 0;
}

std::vector<FiniteSubset> Interaction::supports() const {
  std::vector<FiniteSubset> out;
  for (const auto& e : entries_)
    if (std::find(out.begin(), out.end(), e.pattern.support()) == out.end()) out.push_back(e.pattern.support());
  return out;
}

namespace {

bool matches(const Pattern& p, const Pattern& entry) {
  for (std::size_t i = 0; i < entry.size(); ++i)
    if (p.value(entry.support()[i]) != entry.values()[i]) return false;
  return true;
}

LocallyConstantPotential identity_potential(const Interaction& phi) {
  return LocallyConstantPotential::zero(phi.spec(), phi.symbols());
}

}  // namespace

LocallyConstantPotential f_from_interaction(const Interaction& phi) {
  if (phi.entries().empty()) return identity_potential(phi);
  FiniteSubset window;
  for (const auto& s : phi.supports()) window = set_union(window, s);
  // Fix_Gamma(F) is trivial for torsion-free groups, so every orbit
  // representative carries weight one.
  return LocallyConstantPotential::from_function(window, phi.symbols(), [&](const std::vector<Symbol>& vals) {
    Pattern p(window, vals);
    double sum = 0;
    for (const auto& e : phi.entries())
      if (matches(p, e.pattern)) sum += e.value;
    return sum;
  });
}

LocallyConstantPotential h_from_interaction(const Interaction& phi) {
  if (phi.entries().empty()) return identity_potential(phi);
  struct Translate {
    Pattern pattern;
    double weight;
  };
  std::vector<Translate> translates;
  FiniteSubset window;
  for (const auto& e : phi.entries()) {
    const double w = e.value / static_cast<double>(e.pattern.size());
    for (const auto& s : e.pattern.support()) {
      Pattern t = shift_pattern(inverse(s), e.pattern);
      window = set_union(window, t.support());
      translates.push_back({std::move(t), w});
    }
  }
  return LocallyConstantPotential::from_function(window, phi.symbols(), [&](const std::vector<Symbol>& vals) {
    Pattern p(window, vals);
    double sum = 0;
    for (const auto& t : translates)
      if (matches(p, t.pattern)) sum += t.weight;
    return sum;
  });
}

double interaction_norm(const Interaction& phi) {
  std::map<FiniteSubset, double> sup;
  for (const auto& e : phi.entries()) {
    double& m = sup[e.pattern.support()];
    m = std::max(m, std::abs(e.value));
  }
  double norm = 0;
  for (const auto& [support, m] : sup) norm += static_cast<double>(support.size()) * m;
  return norm;
}

double psi_interaction(const Interaction& phi, const AsymptoticPair& pair) {
  double sum = 0;
  for (const auto& e : phi.entries()) {
    const FiniteSubset& s = e.pattern.support();
    for (const auto& t : set_product(pair.diff(), set_inverse(s))) {
      const FiniteSubset cells = translate(t, s);
      if (!cells.is_subset_of(pair.window()))
        throw WindowTooSmall("pair window must contain every interaction support meeting the difference set");
      const Pattern placed = shift_pattern(t, e.pattern);
      if (matches(pair.y(), placed)) sum += e.value;
      if (matches(pair.x(), placed)) sum -= e.value;
    }
  }
  return sum;
}

// ------------------------------------------------------------------- cocycle

AsymptoticPair::AsymptoticPair(Pattern x, Pattern y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.support() != y_.support()) throw PreconditionError("asymptotic pair needs a common window");
  std::vector<GroupElement> d;
  for (std::size_t i = 0; i < x_.size(); ++i)
    if (x_.values()[i] != y_.values()[i]) d.push_back(x_.support()[i]);
  diff_ = FiniteSubset(std::move(d));
}

AsymptoticPair AsymptoticPair::shifted(const GroupElement& g) const {
  AsymptoticPair out(shift_pattern(g, x_), shift_pattern(g, y_));
  out.etale_certificate = etale_certificate;
  return out;
}

FiniteSubset psi_required_window(const FiniteSubset& diff, const FiniteSubset& f_window) {
  return set_product(set_product(diff, set_inverse(f_window)), f_window);
}

double psi_f(const LocallyConstantPotential& f, const AsymptoticPair& pair) {
  if (pair.diff().empty()) return 0;
  if (!psi_required_window(pair.diff(), f.window()).is_subset_of(pair.window()))
    throw WindowTooSmall("pair window must contain diff·F^-1·F");
  double sum = 0;
  for (const auto& g : set_product(f.window(), set_inverse(pair.diff()))) {
    const GroupElement ginv = inverse(g);
    std::size_t cx = 0, cy = 0;
    for (const auto& h : f.window()) {
      const GroupElement cell = mul(ginv, h);
      cx = cx * f.symbols() + static_cast<std::size_t>(pair.x().value(cell));
      cy = cy * f.symbols() + static_cast<std::size_t>(pair.y().value(cell));
    }
    sum += f.at_code(cy) - f.at_code(cx);
  }
  return sum;
}

// ---------------------------------------------------------------- variation

Filtration Filtration::balls(GroupSpec spec) {
  Filtration f;
  f.spec_ = std::move(spec);
  return f;
}

Filtration Filtration::explicit_sets(std::vector<FiniteSubset> sets) {
  for (std::size_t i = 1; i < sets.size(); ++i)
    if (!sets[i - 1].is_subset_of(sets[i])) throw PreconditionError("filtration must be increasing");
  Filtration f;
  f.sets_ = std::move(sets);
  return f;
}

FiniteSubset Filtration::at(int n) const {
  if (n < 1) throw PreconditionError("filtration indices start at 1");
  if (spec_) return ball(*spec_, n);
  if (n > static_cast<int>(sets_.size())) throw PreconditionError("index beyond the explicit filtration");
  return sets_[n - 1];
}

std::optional<int> Filtration::length() const {
  if (spec_) return std::nullopt;
  return static_cast<int>(sets_.size());
}

double var_window(const Subshift& x, const LocallyConstantPotential& f, const FiniteSubset& s) {
  if (f.window().is_subset_of(s)) return 0;
  const FiniteSubset u = set_union(f.window(), s);
  std::map<Pattern, std::pair<double, double>> range;  // by x|_S: (min, max)
  for (const auto& p : admissible_patterns(x, u)) {
    const double v = eval_potential(f, p);
    auto [it, fresh] = range.try_emplace(p.restrict_to(s), v, v);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  double var = 0;
  for (const auto& [key, mm] : range) var = std::max(var, mm.second - mm.first);
  return var;
}

SvNorm sv_norm_partial(const Subshift& x, const LocallyConstantPotential& f, const Filtration& filtration,
                       const FiniteSubset& s, int n_max) {
  SvNorm out;
  for (int n = 1; n <= n_max; ++n) {
    const FiniteSubset fn = filtration.at(n);
    const double var = var_window(x, f, fn);
    if (var != 0) {
      const FiniteSubset grown = set_difference(set_product(filtration.at(n + 1), s), set_product(fn, s));
      out.value += static_cast<double>(grown.size()) * var;
    }
    out.stabilized = f.window().is_subset_of(fn);
  }
  return out;
}

}  // namespace soficlab
