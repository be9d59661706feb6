#include "soficlab/microstate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "soficlab/error.h"

namespace soficlab {

double EmpiricalWindow::frequency(const std::vector<Symbol>& values) const {
  auto it = counts.find(values);
  if (it == counts.end() || n == 0) return 0;
  return static_cast<double>(it->second) / static_cast<double>(n);
}

double WindowDistribution::probability(const std::vector<Symbol>& values) const {
  auto it = probs.find(values);
  return it == probs.end() ? 0.0 : it->second;
}

std::vector<Vertex> pullback_cells(const SoficMap& sigma, Vertex v, const FiniteSubset& f) {
  if (v >= sigma.size()) throw PreconditionError("vertex out of range");
  std::vector<Vertex> cells;
  cells.reserve(f.size());
  for (const auto& g : f) cells.push_back(sigma.act(inverse(g), v));
  return cells;
}

Pattern pullback(const SoficMap& sigma, const Microstate& w, Vertex v, const FiniteSubset& f) {
  std::vector<Symbol> vals;
  for (Vertex c : pullback_cells(sigma, v, f)) vals.push_back(w[c]);
  return Pattern(f, std::move(vals));
}

namespace {

// Column-major table: perms[i][v] = sigma(g_i^{-1}) v for g_i in F.
std::vector<std::vector<Vertex>> pullback_table(const SoficMap& sigma, const FiniteSubset& f) {
  std::vector<std::vector<Vertex>> perms;
  for (const auto& g : f) perms.push_back(sigma.permutation(inverse(g)));
  return perms;
}

std::vector<Symbol> read_window(const std::vector<std::vector<Vertex>>& perms, const Microstate& w, Vertex v) {
  std::vector<Symbol> vals(perms.size());
  for (std::size_t i = 0; i < perms.size(); ++i) vals[i] = w[perms[i][v]];
  return vals;
}

void require_size(const SoficMap& sigma, const Microstate& w) {
  if (w.size() != sigma.size()) throw PreconditionError("microstate length differs from the model size");
}

}  // namespace

EmpiricalWindow empirical(const SoficMap& sigma, const Microstate& w, const FiniteSubset& f) {
  require_size(sigma, w);
  const auto perms = pullback_table(sigma, f);
  EmpiricalWindow e{f, {}, sigma.size()};
  for (Vertex v = 0; v < sigma.size(); ++v) ++e.counts[read_window(perms, w, v)];
  return e;
}

Fraction admissible_fraction(const SoficMap& sigma, const Microstate& w, const Subshift& x, const FiniteSubset& f) {
  const EmpiricalWindow e = empirical(sigma, w, f);
  Fraction out{0, sigma.size()};
  for (const auto& [vals, count] : e.counts)
    if (admissible(x, Pattern(f, vals))) out.num += count;
  return out;
}

WindowDistribution zeta(const std::vector<std::pair<double, EmpiricalWindow>>& weighted) {
  if (weighted.empty()) throw PreconditionError("zeta needs at least one microstate");
  double total = 0;
  for (const auto& [weight, e] : weighted) {
    if (weight < 0) throw PreconditionError("zeta weights must be nonnegative");
    if (e.window != weighted.front().second.window) throw PreconditionError("zeta needs a common window");
    total += weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("zeta weights must sum to 1");
  WindowDistribution out{weighted.front().second.window, {}};
  for (const auto& [weight, e] : weighted)
    for (const auto& [vals, count] : e.counts)
      out.probs[vals] += weight * static_cast<double>(count) / static_cast<double>(e.n);
  return out;
}

Microstate microstate_exchange(const SoficMap& sigma, const Microstate& w, const Exchange& e) {
  require_size(sigma, w);
  validate_exchange(e);
  // For h in F1 the lookup cell of k in F2 is sigma(k^{-1} h) v.
  std::vector<std::vector<std::vector<Vertex>>> lookup;
  for (const auto& h : e.f1) {
    std::vector<std::vector<Vertex>> row;
    for (const auto& k : e.f2) row.push_back(sigma.permutation(mul(inverse(k), h)));
    lookup.push_back(std::move(row));
  }
  Microstate out = w;
  for (Vertex v = 0; v < sigma.size(); ++v) {
    for (std::size_t hi = 0; hi < e.f1.size(); ++hi) {
      bool match = true;
      for (std::size_t ki = 0; ki < e.f2.size() && match; ++ki) match = w[lookup[hi][ki][v]] == e.y.values()[ki];
      if (match) {
        out.values[v] = e.x.value(e.f1[hi]);
        break;
      }
    }
  }
  return out;
}

bool in_exchange_neighborhood(const SoficMap& sigma, const Microstate& w, const Exchange& e,
                              const ExchangeConstraint& c) {
  constexpr double eps = 1e-12;
  const EmpiricalWindow emp = empirical(sigma, w, e.f2);
  const double n = static_cast<double>(sigma.size());
  const double cx = static_cast<double>(emp.counts.contains(e.x.values()) ? emp.counts.at(e.x.values()) : 0);
  const double cy = static_cast<double>(emp.counts.contains(e.y.values()) ? emp.counts.at(e.y.values()) : 0);
  if (std::abs((cx + cy) / n - c.t) > c.delta + eps) return false;
  if (cx == 0) return false;
  if (std::abs(cy / cx - c.r) > c.delta + eps) return false;
  if (c.subshift) {
    const FiniteSubset& win = c.admissibility_window.empty() ? e.f2 : c.admissibility_window;
    const Fraction adm = admissible_fraction(sigma, w, *c.subshift, win);
    if (adm.value() < 1.0 - c.delta - eps) return false;
  }
  return true;
}

PreimageCount count_exchange_preimages(const SoficMap& sigma, const Microstate& w_prime, const Exchange& e,
                                       const ExchangeConstraint& c) {
  require_size(sigma, w_prime);
  validate_exchange(e);
  const auto perms = pullback_table(sigma, e.f2);
  std::vector<Vertex> g_set;
  for (Vertex v = 0; v < sigma.size(); ++v)
    if (read_window(perms, w_prime, v) == e.x.values()) g_set.push_back(v);
  if (g_set.size() > 24) throw SizeLimit("|G(w',x)| = " + std::to_string(g_set.size()) + " exceeds the cap of 24");
  PreimageCount out{0, g_set.size()};
  const std::uint64_t subsets = std::uint64_t{1} << g_set.size();
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    Microstate w = w_prime;
    std::vector<char> written(sigma.size(), 0);
    bool conflict = false;
    for (std::size_t i = 0; i < g_set.size() && !conflict; ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t k = 0; k < perms.size(); ++k) {
        const Vertex cell = perms[k][g_set[i]];
        const Symbol s = e.y.values()[k];
        if (written[cell] && w.values[cell] != s) {
          conflict = true;
          break;
        }
        w.values[cell] = s;
        written[cell] = 1;
      }
    }
    if (conflict) continue;
    if (microstate_exchange(sigma, w, e) != w_prime) continue;
    if (!in_exchange_neighborhood(sigma, w, e, c)) continue;
    ++out.count;
  }
  return out;
}

double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

BinomialBounds exchange_count_bounds(std::size_t g_size, double r, double delta) {
  const double g = static_cast<double>(g_size);
  const double r_star = r / (1 + r);
  BinomialBounds b;
  b.lower = binomial(g_size, static_cast<std::uint64_t>(std::floor(r_star * g)));
  double lo_frac = 0;
  if (r - delta > 0) lo_frac = (r - delta) / (1 + r - delta);
  const double hi_frac = (r + delta) / (1 + r + delta);
  b.band_lo = std::max(0L, static_cast<long>(std::ceil(lo_frac * g - 1e-9)));
  b.band_hi = std::min(static_cast<long>(g_size), static_cast<long>(std::floor(hi_frac * g + 1e-9)));
  for (long k = b.band_lo; k <= b.band_hi; ++k) b.upper += binomial(g_size, static_cast<std::uint64_t>(k));
  return b;
}

std::string write_microstate(const Microstate& w, const std::vector<std::string>& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += alphabet.at(w.values[i]);
  }
  return out;
}

Microstate read_microstate(const std::string& line, const std::vector<std::string>& alphabet) {
  std::istringstream is(line);
  std::string tok;
  Microstate w;
  int col = 1;
  while (is >> tok) {
    auto it = std::find(alphabet.begin(), alphabet.end(), tok);
    if (it == alphabet.end()) throw ParseError(1, col, "unknown symbol '" + tok + "'");
    w.values.push_back(static_cast<Symbol>(it - alphabet.begin()));
    col += static_cast<int>(tok.size()) + 1;
  }
  return w;
}

std::string empirical_csv(const EmpiricalWindow& e, const std::vector<std::string>& alphabet) {
  std::ostringstream os;
  os << "pattern,count,frequency\n";
  for (const auto& [vals, count] : e.counts) {
    os << format_pattern(Pattern(e.window, vals), alphabet) << ',' << count << ',';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(count) / static_cast<double>(e.n));
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace soficlab
