#include "soficlab/pressure.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>
#include <unordered_map>

#include "soficlab/error.h"
#include "soficlab/random.h"

namespace soficlab {

namespace {

constexpr std::size_t kStateCap = 20'000'000;
constexpr std::size_t kTableCap = std::size_t{1} << 20;
constexpr std::size_t kMarginalCap = 64;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t pattern_count(int symbols, std::size_t cells, std::size_t cap) {
  std::size_t c = 1;
  for (std::size_t i = 0; i < cells; ++i) {
    c *= static_cast<std::size_t>(symbols);
    if (c > cap) throw SizeLimit("window has more than " + std::to_string(cap) + " patterns");
  }
  return c;
}

std::vector<Symbol> decode(std::size_t code, int symbols, std::size_t cells) {
  std::vector<Symbol> v(cells);
  for (std::size_t i = cells; i-- > 0;) {
    v[i] = static_cast<Symbol>(code % symbols);
    code /= symbols;
  }
  return v;
}

// Breadth-first order from vertex 0 along generator edges in both
// directions; other components follow from their least vertex.
std::vector<Vertex> bfs_order(const SoficMap& sigma) {
  std::vector<std::vector<Vertex>> moves;
  for (int i = 0; i < sigma.spec().rank(); ++i) {
    const GroupElement g = GroupElement::generator(sigma.spec(), i);
    moves.push_back(sigma.permutation(g));
    moves.push_back(sigma.permutation(inverse(g)));
  }
  std::vector<char> seen(sigma.size(), 0);
  std::vector<Vertex> order;
  order.reserve(sigma.size());
  for (Vertex root = 0; root < sigma.size(); ++root) {
    if (seen[root]) continue;
    std::deque<Vertex> queue{root};
    seen[root] = 1;
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (const auto& m : moves)
        if (!seen[m[v]]) seen[m[v]] = 1, queue.push_back(m[v]);
    }
  }
  return order;
}

// Constraint data shared by the exact and sampling engines.
struct Problem {
  int symbols = 0;
  std::size_t n = 0;
  std::vector<Vertex> order;
  std::vector<std::size_t> position;  // position[v] in order

  // Checks: admissibility (and marginal) on F, energy on the f window.
  struct Check {
    bool window_check = false;
    std::vector<Vertex> cells;
  };
  std::vector<Check> checks;
  std::vector<std::vector<std::size_t>> completing;  // checks finished at step t
  std::vector<std::size_t> last_use;                  // step after which v is not read

  bool track_bad = false;
  long threshold = 0;
  std::vector<char> admissible_code;  // by F-code
  bool use_f = false;
  const LocallyConstantPotential* f = nullptr;

  bool track_marginal = false;
  double delta = 0;
  std::vector<double> mu_code;  // mu's F-marginal by code
};

Problem make_problem(const Subshift& x, const SoficMap& sigma, const LocallyConstantPotential& f, double delta,
                     const FiniteSubset& window, const MeasureSpec* mu) {
  if (!(delta >= 0 && delta <= 1)) throw PreconditionError("delta must lie in [0, 1]");
  if (x.spec() != sigma.spec()) throw SpecMismatch("subshift and sofic model use different groups");
  if (f.symbols() != x.alphabet_size()) throw SpecMismatch("potential alphabet differs from the subshift's");
  if (window.empty()) throw PreconditionError("admissibility window must be nonempty");
  if (!window[0].belongs_to(x.spec())) throw SpecMismatch("window outside the subshift's group");
  if (!f.window().empty() && !f.window()[0].belongs_to(x.spec()))
    throw SpecMismatch("potential window outside the subshift's group");

  Problem p;
  p.symbols = x.alphabet_size();
  p.n = sigma.size();
  p.order = bfs_order(sigma);
  p.position.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) p.position[p.order[i]] = i;
  p.delta = delta;
  p.threshold = static_cast<long>(std::floor(delta * static_cast<double>(p.n) + 1e-9));
  p.track_bad = p.threshold < static_cast<long>(p.n);
  p.track_marginal = mu != nullptr;
  p.f = &f;
  p.use_f = std::any_of(f.table().begin(), f.table().end(), [](double v) { return v != 0; });

  if (p.track_bad || p.track_marginal) {
    const std::size_t codes = pattern_count(p.symbols, window.size(), kTableCap);
    p.admissible_code.resize(codes);
    for (std::size_t c = 0; c < codes; ++c)
      p.admissible_code[c] = admissible(x, Pattern(window, decode(c, p.symbols, window.size())));
  }
  if (p.track_marginal) {
    const std::size_t codes = pattern_count(p.symbols, window.size(), kMarginalCap);
    p.mu_code.assign(codes, 0.0);
    const WindowDistribution d = marginal(*mu, window, p.symbols);
    for (const auto& [vals, prob] : d.probs) {
      std::size_t c = 0;
      for (Symbol s : vals) c = c * p.symbols + static_cast<std::size_t>(s);
      p.mu_code[c] = prob;
    }
  }

  p.completing.assign(p.n, {});
  p.last_use.assign(p.n, 0);
  for (std::size_t i = 0; i < p.n; ++i) p.last_use[p.order[i]] = i;
  auto add_check = [&](bool window_check, std::vector<Vertex> cells) {
    std::size_t done = 0;
    for (Vertex c : cells) done = std::max(done, p.position[c]);
    for (Vertex c : cells) p.last_use[c] = std::max(p.last_use[c], done);
    p.completing[done].push_back(p.checks.size());
    p.checks.push_back({window_check, std::move(cells)});
  };
  const bool window_checks = p.track_bad || p.track_marginal;
  for (Vertex v = 0; v < p.n; ++v) {
    if (window_checks) add_check(true, pullback_cells(sigma, v, window));
    if (p.use_f) add_check(false, pullback_cells(sigma, v, f.window()));
  }
  return p;
}

// Total variation from mu, given counts that can only grow.
double tv_lower_bound(const Problem& p, const std::int32_t* counts) {
  double tv = 0;
  for (std::size_t c = 0; c < p.mu_code.size(); ++c)
    tv += std::max(0.0, static_cast<double>(counts[c]) / static_cast<double>(p.n) - p.mu_code[c]);
  return tv;
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int32_t v : k) h = (h ^ static_cast<std::uint32_t>(v)) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

struct Acc {
  long double count = 0;
  long double weight = 0;
};

PressureResult finish(PressureResult r, long double count, long double weight, long double log_scale) {
  r.count = count;
  if (weight <= 0) {
    r.log_partition = kNegInf;
    r.value = kNegInf;
  } else {
    r.log_partition = static_cast<double>(std::log(weight) + log_scale);
    r.value = r.log_partition / static_cast<double>(r.n);
  }
  return r;
}

PressureResult run_exact(const Problem& p, PressureResult r) {
  using Key = std::vector<std::int32_t>;
  const std::size_t extras = (p.track_bad ? 1 : 0) + (p.track_marginal ? p.mu_code.size() : 0);
  const std::size_t bad_at = 0;
  const std::size_t marg_at = p.track_bad ? 1 : 0;

  std::vector<Vertex> active;
  std::unordered_map<Key, Acc, KeyHash> states;
  states.emplace(Key(extras, 0), Acc{1, 1});
  long double log_scale = 0;

  std::vector<std::int32_t> ext;
  std::vector<std::int32_t> extra(extras);
  for (std::size_t t = 0; t < p.n; ++t) {
    const Vertex cur = p.order[t];
    std::vector<Vertex> ext_vertices = active;
    ext_vertices.push_back(cur);
    std::unordered_map<Vertex, std::size_t> slot;
    for (std::size_t i = 0; i < ext_vertices.size(); ++i) slot[ext_vertices[i]] = i;
    struct Compiled {
      bool window_check;
      std::vector<std::size_t> idx;
    };
    std::vector<Compiled> compiled;
    for (std::size_t ci : p.completing[t]) {
      Compiled c{p.checks[ci].window_check, {}};
      for (Vertex v : p.checks[ci].cells) c.idx.push_back(slot.at(v));
      compiled.push_back(std::move(c));
    }
    std::vector<Vertex> next_active;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ext_vertices.size(); ++i)
      if (p.last_use[ext_vertices[i]] > t) next_active.push_back(ext_vertices[i]), keep.push_back(i);

    std::unordered_map<Key, Acc, KeyHash> next;
    next.reserve(states.size() * 2);
    const std::size_t m = active.size();
    for (const auto& [key, acc] : states) {
      ext.assign(key.begin(), key.begin() + static_cast<long>(m));
      ext.push_back(0);
      for (Symbol a = 0; a < p.symbols; ++a) {
        ext[m] = a;
        std::copy(key.begin() + static_cast<long>(m), key.end(), extra.begin());
        double energy = 0;
        bool ok = true;
        for (const auto& c : compiled) {
          std::size_t code = 0;
          for (std::size_t i : c.idx) code = code * p.symbols + static_cast<std::size_t>(ext[i]);
          if (c.window_check) {
            if (p.track_bad && !p.admissible_code[code] && ++extra[bad_at] > p.threshold) {
              ok = false;
              break;
            }
            if (p.track_marginal) {
              ++extra[marg_at + code];
              if (tv_lower_bound(p, extra.data() + marg_at) > p.delta + 1e-12) {
                ok = false;
                break;
              }
            }
          } else {
            energy += p.f->at_code(code);
          }
        }
        if (!ok) continue;
        Key nk;
        nk.reserve(keep.size() + extras);
        for (std::size_t i : keep) nk.push_back(ext[i]);
        nk.insert(nk.end(), extra.begin(), extra.end());
        Acc& dst = next[std::move(nk)];
        dst.count += acc.count;
        dst.weight += acc.weight * std::exp(static_cast<long double>(energy));
      }
    }
    if (next.size() > kStateCap) throw SizeLimit("enumeration frontier exceeds " + std::to_string(kStateCap) + " states");
    long double top = 0;
    for (const auto& [k, acc] : next) top = std::max(top, acc.weight);
    if (top > 1e1000L || (top > 0 && top < 1e-1000L)) {
      for (auto& [k, acc] : next) acc.weight /= top;
      log_scale += std::log(top);
    }
    states = std::move(next);
    active = std::move(next_active);
  }
  long double count = 0, weight = 0;
  for (const auto& [k, acc] : states) count += acc.count, weight += acc.weight;
  return finish(r, count, weight, log_scale);
}

PressureResult base_result(const SoficMap& sigma, double delta, const FiniteSubset& window) {
  PressureResult r;
  r.n = sigma.size();
  r.delta = delta;
  r.window = window;
  return r;
}

}  // namespace

PressureResult enumerate_pressure(const Subshift& x, const SoficMap& sigma, const LocallyConstantPotential& f,
                                  double delta, const FiniteSubset& window) {
  const Problem p = make_problem(x, sigma, f, delta, window, nullptr);
  return run_exact(p, base_result(sigma, delta, window));
}

PressureResult pressure_measure_neighborhood(const Subshift& x, const SoficMap& sigma,
                                             const LocallyConstantPotential& f, const MeasureSpec& mu, double delta,
                                             const FiniteSubset& window) {
  const Problem p = make_problem(x, sigma, f, delta, window, &mu);
  return run_exact(p, base_result(sigma, delta, window));
}

double easy_direction_delta(const Subshift& x, const MeasureSpec& mu, double delta, const FiniteSubset& window) {
  double bad = 0;
  for (const auto& [vals, prob] : marginal(mu, window, x.alphabet_size()).probs)
    if (!admissible(x, Pattern(window, vals))) bad += prob;
  return delta - bad;
}

PressureResult estimate_pressure_sis(const Subshift& x, const SoficMap& sigma, const LocallyConstantPotential& f,
                                     double delta, const FiniteSubset& window, const SisOptions& options) {
  if (options.samples == 0) throw PreconditionError("sampling needs at least one sample");
  const Problem p = make_problem(x, sigma, f, delta, window, nullptr);
  std::vector<double> log_w(options.samples, kNegInf);

  auto run_sample = [&](std::size_t s) {
    Rng rng(derive_seed(options.seed, s));
    std::vector<Symbol> vals(p.n, 0);
    long bad = 0;
    double lw = 0;
    std::vector<double> weight(p.symbols);
    std::vector<long> bad_after(p.symbols);
    for (std::size_t t = 0; t < p.n; ++t) {
      const Vertex cur = p.order[t];
      double total = 0;
      for (Symbol a = 0; a < p.symbols; ++a) {
        vals[cur] = a;
        long b = bad;
        double energy = 0;
        bool ok = true;
        for (std::size_t ci : p.completing[t]) {
          const auto& c = p.checks[ci];
          std::size_t code = 0;
          for (Vertex v : c.cells) code = code * p.symbols + static_cast<std::size_t>(vals[v]);
          if (c.window_check) {
            if (!p.admissible_code[code] && ++b > p.threshold) {
              ok = false;
              break;
            }
          } else {
            energy += p.f->at_code(code);
          }
        }
        weight[a] = ok ? std::exp(energy) : 0.0;
        bad_after[a] = b;
        total += weight[a];
      }
      if (total <= 0) return kNegInf;
      double u = rng.uniform() * total;
      Symbol pick = 0;
      for (; pick + 1 < p.symbols; ++pick) {
        if (u < weight[pick]) break;
        u -= weight[pick];
      }
      while (weight[pick] == 0) --pick;  // guard against rounding onto a dead branch
      vals[cur] = pick;
      bad = bad_after[pick];
      lw += std::log(total);
    }
    return lw;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.samples)));
  if (threads == 1) {
    for (std::size_t s = 0; s < options.samples; ++s) log_w[s] = run_sample(s);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (options.samples + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        const std::size_t lo = t * chunk, hi = std::min(options.samples, lo + chunk);
        for (std::size_t s = lo; s < hi; ++s) log_w[s] = run_sample(s);
      });
    for (auto& th : pool) th.join();
  }

  PressureResult r = base_result(sigma, delta, window);
  r.exact = false;
  r.seed = options.seed;
  r.samples = options.samples;
  double top = kNegInf;
  std::size_t dead = 0;
  for (double v : log_w) {
    top = std::max(top, v);
    dead += v == kNegInf;
  }
  r.rejected = static_cast<double>(dead) / static_cast<double>(options.samples);
  if (top == kNegInf) return finish(r, 0, 0, 0);
  // Mean and spread of exp(log_w - top).
  const double m = static_cast<double>(options.samples);
  double sum = 0, sum_sq = 0;
  for (double v : log_w) {
    const double w = v == kNegInf ? 0.0 : std::exp(v - top);
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / m;
  const double var = options.samples > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1)) : 0.0;
  r = finish(r, 0, mean, top);
  r.count = std::exp(static_cast<long double>(r.log_partition));
  r.stderr_value = std::sqrt(var / m) / mean / static_cast<double>(r.n);
  return r;
}

std::vector<PressureResult> pressure_curve(const Subshift& x, const std::vector<SoficMap>& models,
                                           const LocallyConstantPotential& f, const std::vector<double>& deltas,
                                           const FiniteSubset& window) {
  std::vector<PressureResult> rows;
  for (const auto& sigma : models)
    for (double d : deltas) rows.push_back(enumerate_pressure(x, sigma, f, d, window));
  return rows;
}

Subshift product_with_full_shift(const Subshift& x, int m) {
  if (m < 1) throw PreconditionError("product factor needs at least one symbol");
  std::vector<std::string> names;
  for (const auto& a : x.alphabet())
    for (int b = 0; b < m; ++b) names.push_back(a + "/" + std::to_string(b));
  if (x.is_oracle()) {
    if (x.oracle_kind() != OracleKind::Full) throw UnsupportedShape("product needs a subshift given by forbidden patterns");
    return Subshift::full(x.spec(), std::move(names));
  }
  std::vector<Pattern> lifted;
  for (const auto& p : x.forbidden_patterns()) {
    std::vector<Symbol> second(p.size(), 0);
    const std::size_t total = pattern_count(m, p.size(), kTableCap);
    for (std::size_t c = 0; c < total; ++c) {
      second = decode(c, m, p.size());
      std::vector<Symbol> vals(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) vals[i] = p.values()[i] * m + second[i];
      lifted.emplace_back(p.support(), std::move(vals));
    }
  }
  return Subshift::forbidden(x.spec(), std::move(names), std::move(lifted));
}

LocallyConstantPotential lift_to_product(const LocallyConstantPotential& f, int m) {
  const int k = f.symbols();
  const std::size_t cells = f.window().size();
  return LocallyConstantPotential::from_function(f.window(), k * m, [&](const std::vector<Symbol>& vals) {
    std::vector<Symbol> first(cells);
    for (std::size_t i = 0; i < cells; ++i) first[i] = vals[i] / m;
    return f.at_code(f.code(first));
  });
}

double entropy_H(double p) {
  auto xlogx = [](double t) { return t > 0 ? t * std::log(t) : 0.0; };
  return -xlogx(p) - xlogx(1 - p);
}

double phat(double r, double c) {
  if (!(r >= 0)) throw PreconditionError("phat needs r >= 0");
  if (std::isinf(r)) return c;
  const double rs = r / (1 + r);
  return entropy_H(rs) + rs * c;
}

double phat_argmax(double c) { return std::exp(c); }

double phat_grid_argmax(double c, double r_max, int grid_points) {
  if (grid_points < 3 || !(r_max > 0)) throw PreconditionError("grid needs a positive range and three points");
  const double step = r_max / (grid_points - 1);
  int best = 0;
  for (int i = 1; i < grid_points; ++i)
    if (phat(i * step, c) > phat(best * step, c)) best = i;
  double a = std::max(0.0, (best - 1) * step), b = std::min(r_max, (best + 1) * step);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = phat(x1, c), f2 = phat(x2, c);
  while (b - a > 1e-13 * std::max(1.0, b)) {
    if (f1 >= f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - g * (b - a), f1 = phat(x1, c);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + g * (b - a), f2 = phat(x2, c);
    }
  }
  return 0.5 * (a + b);
}

double stirling_gap(std::uint64_t n, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw PreconditionError("alpha must lie in (0, 1)");
  const auto k = static_cast<std::uint64_t>(std::floor(alpha * static_cast<double>(n)));
  if (k < 1 || k + 1 > n) throw PreconditionError("floor(alpha n) must lie in [1, n-1]");
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  const double log_binom = std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1);
  return log_binom - nd * entropy_H(kd / nd);
}

}  // namespace soficlab
