#include "soficlab/measure.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "soficlab/error.h"

namespace soficlab {

namespace {

constexpr double kEnumerationCap = 1 << 22;

// Lowest coordinate of an interval support over Z, or nothing.
std::optional<int> interval_start(const FiniteSubset& s) {
  if (s.empty()) return 0;
  for (const auto& g : s)
    if (!g.belongs_to(GroupSpec::lattice(1))) return std::nullopt;
  const int lo = s[0].data()[0];
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].data()[0] != lo + static_cast<int>(i)) return std::nullopt;
  return lo;
}

double xlogx(double p) { return p > 0 ? p * std::log(p) : 0.0; }

void check_probs(const std::vector<double>& probs) {
  if (probs.empty()) throw PreconditionError("distribution needs at least one symbol");
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0)) throw PreconditionError("probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("probabilities must sum to 1");
}

int measure_symbols(const MeasureSpec& mu) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Bernoulli>) return static_cast<int>(m.probs.size());
        else if constexpr (std::is_same_v<T, MarkovZ>) return static_cast<int>(m.transition.rows());
        else if constexpr (std::is_same_v<T, HaarGroupShift>) return m.subshift.alphabet_size();
        else return -1;
      },
      mu);
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

MeasureSpec make_bernoulli(std::vector<double> probs) {
  check_probs(probs);
  return Bernoulli{std::move(probs)};
}

MeasureSpec gibbs_bernoulli(const LocallyConstantPotential& f) {
  if (f.window().size() != 1 || !f.window()[0].is_identity())
    throw PreconditionError("Gibbs Bernoulli needs a single-site potential");
  std::vector<double> w;
  double total = 0;
  for (double v : f.table()) total += w.emplace_back(std::exp(v));
  for (double& p : w) p /= total;
  return Bernoulli{std::move(w)};
}

MeasureSpec make_markov(Eigen::MatrixXd transition) {
  const Eigen::Index k = transition.rows();
  if (k == 0 || transition.cols() != k) throw PreconditionError("transition matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < k; ++i) {
    if ((transition.row(i).array() < 0).any()) throw PreconditionError("transition entries must be nonnegative");
    if (std::abs(transition.row(i).sum() - 1.0) > 1e-9) throw PreconditionError("transition rows must sum to 1");
  }
  // pi (P - I) = 0 with sum(pi) = 1: solve the transposed system with the
  // last equation replaced by normalization.
  Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw PreconditionError("transition matrix has no unique stationary vector");
  Eigen::RowVectorXd pi = lu.solve(b).transpose();
  for (Eigen::Index i = 0; i < k; ++i) pi(i) = std::max(pi(i), 0.0);
  pi /= pi.sum();
  return MarkovZ{std::move(transition), std::move(pi)};
}

bool is_group_shift(const Subshift& x) {
  if (!x.over_z()) return false;
  if (x.is_oracle()) return x.oracle_kind() == OracleKind::Full;
  const int k = x.alphabet_size();
  const int len = 2 * std::max(x.z_range(), 1) + 1;
  const FiniteSubset w = z_interval(0, len - 1);
  const auto pats = admissible_patterns(x, w);
  if (!admissible(x, Pattern(w, std::vector<Symbol>(len, 0)))) return false;
  for (const auto& p : pats) {
    std::vector<Symbol> neg(len);
    for (int i = 0; i < len; ++i) neg[i] = (k - p.values()[i]) % k;
    if (!std::binary_search(pats.begin(), pats.end(), Pattern(w, neg))) return false;
    for (const auto& q : pats) {
      std::vector<Symbol> sum(len);
      for (int i = 0; i < len; ++i) sum[i] = (p.values()[i] + q.values()[i]) % k;
      if (!std::binary_search(pats.begin(), pats.end(), Pattern(w, sum))) return false;
    }
  }
  return true;
}

MeasureSpec make_haar(const Subshift& x) {
  if (!is_group_shift(x)) throw NotGroupShift("subshift is not closed under cellwise addition mod |A|");
  return HaarGroupShift{x};
}

MeasureSpec parry_measure(const Subshift& x) {
  if (!x.over_z() || x.is_oracle()) throw UnsupportedShape("Parry measure needs an SFT over Z");
  if (x.z_range() > 1) throw UnsupportedShape("Parry measure is built for range <= 1");
  const int k = x.alphabet_size();
  auto g = make_z_graph(x, 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (g->forward[i] && g->backward[i] && g->forward[j] && g->backward[j] && g->edge_ok[i * k + j]) a(i, j) = 1;
  Eigen::EigenSolver<Eigen::MatrixXd> right(a), left(a.transpose());
  auto perron = [](const Eigen::EigenSolver<Eigen::MatrixXd>& es) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    if (v.sum() < 0) v = -v;
    return std::make_pair(es.eigenvalues()(best).real(), Eigen::VectorXd(v.cwiseMax(0.0)));
  };
  const auto [lambda, v] = perron(right);
  const auto [lambda_l, u] = perron(left);
  if (lambda <= 0) throw PreconditionError("subshift is empty");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    if (v(i) <= 0) {
      p(i, i) = 1;  // transient symbol: never charged by the stationary vector
      continue;
    }
    for (int j = 0; j < k; ++j) p(i, j) = a(i, j) * v(j) / (lambda * v(i));
    p.row(i) /= p.row(i).sum();
  }
  Eigen::RowVectorXd pi = (u.array() * v.array()).matrix().transpose();
  pi /= pi.sum();
  return MarkovZ{std::move(p), std::move(pi)};
}

double cylinder_prob(const MeasureSpec& mu, const Pattern& p) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          double prob = 1;
          for (Symbol s : p.values()) {
            if (s < 0 || s >= static_cast<Symbol>(m.probs.size())) return 0.0;
            prob *= m.probs[s];
          }
          return prob;
        } else if constexpr (std::is_same_v<T, MarkovZ>) {
          if (!interval_start(p.support())) throw UnsupportedShape("Markov cylinders need an interval support over Z");
          if (p.size() == 0) return 1.0;
          const auto& v = p.values();
          const Symbol k = static_cast<Symbol>(m.transition.rows());
          for (Symbol s : v)
            if (s < 0 || s >= k) return 0.0;
          double prob = m.stationary(v[0]);
          for (std::size_t i = 1; i < v.size(); ++i) prob *= m.transition(v[i - 1], v[i]);
          return prob;
        } else if constexpr (std::is_same_v<T, HaarGroupShift>) {
          if (!m.subshift.over_z()) throw UnsupportedShape("Haar cylinders are computed over Z only");
          if (!admissible(m.subshift, p)) return 0.0;
          return 1.0 / static_cast<double>(admissible_patterns(m.subshift, p.support()).size());
        } else {
          const EmpiricalWindow& e = m.window;
          if (!p.support().is_subset_of(e.window))
            throw UnsupportedShape("empirical cylinders need a support inside the recorded window");
          if (e.n == 0) return 0.0;
          std::vector<long> idx;
          for (const auto& g : p.support()) idx.push_back(e.window.index_of(g));
          std::uint64_t hits = 0;
          for (const auto& [vals, count] : e.counts) {
            bool match = true;
            for (std::size_t i = 0; i < idx.size() && match; ++i) match = vals[idx[i]] == p.values()[i];
            if (match) hits += count;
          }
          return static_cast<double>(hits) / static_cast<double>(e.n);
        }
      },
      mu);
}

WindowDistribution marginal(const MeasureSpec& mu, const FiniteSubset& f, int symbols) {
  WindowDistribution out{f, {}};
  if (const auto* e = std::get_if<EmpiricalMeasure>(&mu); e && e->window.window == f) {
    for (const auto& [vals, count] : e->window.counts)
      out.probs[vals] = static_cast<double>(count) / static_cast<double>(e->window.n);
    return out;
  }
  if (std::pow(static_cast<double>(symbols), static_cast<double>(f.size())) > kEnumerationCap)
    throw SizeLimit("window has too many patterns to tabulate");
  std::vector<Symbol> digits(f.size(), 0);
  do {
    const double p = cylinder_prob(mu, Pattern(f, digits));
    if (p > 0) out.probs[digits] = p;
  } while (advance(digits, symbols));
  return out;
}

GibbsReport gibbs_ratio_residual(const MeasureSpec& mu, const LocallyConstantPotential& f,
                                 const AsymptoticPair& pair) {
  GibbsReport r;
  r.etale = pair.etale_certificate && pair.etale_certificate->yes();
  r.cocycle = std::exp(psi_f(f, pair));
  const double px = cylinder_prob(mu, pair.x());
  if (px <= 0) {
    r.singular = true;
    return r;
  }
  // Cancel the factors common to both cylinders where the model allows it.
  if (const auto* b = std::get_if<Bernoulli>(&mu)) {
    double ratio = 1;
    for (const auto& g : pair.diff()) ratio *= b->probs[pair.y().value(g)] / b->probs[pair.x().value(g)];
    r.ratio = ratio;
  } else if (const auto* m = std::get_if<MarkovZ>(&mu)) {
    const auto& xv = pair.x().values();
    const auto& yv = pair.y().values();
    double num = 1, den = 1;
    if (xv[0] != yv[0]) num *= m->stationary(yv[0]), den *= m->stationary(xv[0]);
    for (std::size_t i = 1; i < xv.size(); ++i)
      if (xv[i - 1] != yv[i - 1] || xv[i] != yv[i])
        num *= m->transition(yv[i - 1], yv[i]), den *= m->transition(xv[i - 1], xv[i]);
    r.ratio = num / den;
  } else {
    r.ratio = cylinder_prob(mu, pair.y()) / px;
  }
  r.residual = std::abs(r.ratio - r.cocycle);
  return r;
}

namespace {

// Radius at which interchange checks are decisive, or a one-cell annulus.
int certificate_radius(const Subshift& x) { return x.exact_interchange_radius().value_or(1); }

}  // namespace

InterchangeVerdict certify_etale(const Subshift& x, const AsymptoticPair& pair) {
  return interchangeable(x, pair.x(), pair.y(), certificate_radius(x));
}

std::vector<AsymptoticPair> etale_pairs(const Subshift& x, int radius) {
  const auto pats = admissible_patterns(x, ball(x.spec(), radius));
  std::vector<AsymptoticPair> out;
  const int check = certificate_radius(x);
  for (const auto& p : pats)
    for (const auto& q : pats) {
      if (p == q) continue;
      auto verdict = interchangeable(x, p, q, check);
      if (!verdict.yes()) continue;
      AsymptoticPair pair(p, q);
      pair.etale_certificate = verdict;
      out.push_back(std::move(pair));
    }
  return out;
}

namespace {

struct Recoded {
  Eigen::MatrixXd matrix;
};

Recoded recode(const Subshift& x, const LocallyConstantPotential& f) {
  if (!x.over_z() || x.is_oracle()) throw UnsupportedShape("transfer matrices need an SFT over Z");
  const auto lo = interval_start(f.window());
  if (!f.window().empty() && !f.window()[0].belongs_to(x.spec()))
    throw SpecMismatch("potential and subshift live on different groups");
  // Any window over Z is read inside its hull; pad the table accordingly.
  int span = 0;
  LocallyConstantPotential g = f;
  if (!f.window().empty()) {
    const int a = f.window()[0].data()[0];
    const int b = f.window()[f.window().size() - 1].data()[0];
    span = b - a;
    if (!lo) g = f.widened(z_interval(a, b));
    // Translate so the window starts at 0; pressure is shift invariant.
    std::vector<GroupElement> cells;
    for (int i = 0; i <= span; ++i) cells.push_back(z(i));
    g = LocallyConstantPotential(FiniteSubset(cells), f.symbols(), g.table());
  }
  const int k = x.alphabet_size();
  const int block = std::max({x.z_range(), span, 1});
  const auto graph = make_z_graph(x, block);
  std::vector<std::size_t> index(graph->states, static_cast<std::size_t>(-1));
  std::size_t n = 0;
  for (std::size_t s = 0; s < graph->states; ++s)
    if (graph->forward[s] && graph->backward[s]) index[s] = n++;
  Recoded r{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  std::vector<Symbol> word(block + 1);
  for (std::size_t s = 0; s < graph->states; ++s) {
    if (index[s] == static_cast<std::size_t>(-1)) continue;
    std::size_t rest = s;
    for (int i = block - 1; i >= 0; --i) {
      word[i] = static_cast<Symbol>(rest % k);
      rest /= k;
    }
    for (int a = 0; a < k; ++a) {
      if (!graph->edge_ok[s * k + a]) continue;
      const std::size_t t = graph->next_state(s, a);
      if (index[t] == static_cast<std::size_t>(-1)) continue;
      word[block] = a;
      std::size_t code = 0;
      for (int i = 0; i <= span; ++i) code = code * k + static_cast<std::size_t>(word[i]);
      r.matrix(index[s], index[t]) = std::exp(g.at_code(code));
    }
  }
  return r;
}

}  // namespace

Eigen::MatrixXd weighted_transfer_matrix(const Subshift& x, const LocallyConstantPotential& f) {
  return recode(x, f).matrix;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0;
  // Power iteration on M + I keeps the iterate positive, so the
  // Collatz-Wielandt quotients bracket rho(M) + 1.
  const Eigen::MatrixXd shifted = m + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = shifted * v;
    const Eigen::ArrayXd q = w.array() / v.array();
    const double lo = q.minCoeff(), hi = q.maxCoeff();
    if (hi - lo <= 1e-13 * hi) return 0.5 * (lo + hi) - 1;
    v = w / w.maxCoeff();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double rho = 0;
  for (Eigen::Index i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  return rho;
}

double transfer_pressure_Z(const Subshift& x, const LocallyConstantPotential& f) {
  const double rho = spectral_radius(weighted_transfer_matrix(x, f));
  return rho > 0 ? std::log(rho) : -std::numeric_limits<double>::infinity();
}

double measure_entropy(const MeasureSpec& mu) {
  if (const auto* b = std::get_if<Bernoulli>(&mu)) {
    double h = 0;
    for (double p : b->probs) h -= xlogx(p);
    return h;
  }
  if (const auto* m = std::get_if<MarkovZ>(&mu)) {
    double h = 0;
    for (Eigen::Index i = 0; i < m->transition.rows(); ++i)
      for (Eigen::Index j = 0; j < m->transition.cols(); ++j) h -= m->stationary(i) * xlogx(m->transition(i, j));
    return h;
  }
  if (const auto* hg = std::get_if<HaarGroupShift>(&mu)) {
    // Haar is the measure of maximal entropy of the group shift.
    return transfer_pressure_Z(hg->subshift, LocallyConstantPotential::zero(hg->subshift.spec(), hg->subshift.alphabet_size()));
  }
  throw UnsupportedShape("entropy of an empirical measure is not defined");
}

double integral(const MeasureSpec& mu, const LocallyConstantPotential& f) {
  FiniteSubset w = f.window();
  if (std::holds_alternative<MarkovZ>(mu) && !w.empty() && !interval_start(w))
    w = z_interval(w[0].data()[0], w[w.size() - 1].data()[0]);
  const LocallyConstantPotential g = w == f.window() ? f : f.widened(w);
  const int k = std::holds_alternative<EmpiricalMeasure>(mu) ? f.symbols() : measure_symbols(mu);
  const WindowDistribution d = marginal(mu, w, k);
  double total = 0;
  for (const auto& [vals, p] : d.probs) total += p * g.at_code(g.code(vals));
  return total;
}

MeasureFamily golden_mean_family() {
  MeasureFamily fam;
  fam.name = "golden_mean";
  fam.box = {{0.0, 1.0}};
  fam.make = [](std::span<const double> t) -> std::optional<MeasureSpec> {
    const double p = t[0];
    if (p < 0 || p > 1) return std::nullopt;
    Eigen::MatrixXd m(2, 2);
    m << 1 - p, p, 1, 0;
    return make_markov(m);
  };
  return fam;
}

MeasureFamily bernoulli_family(int symbols) {
  if (symbols < 2) throw PreconditionError("Bernoulli family needs at least two symbols");
  MeasureFamily fam;
  fam.name = "bernoulli";
  fam.box.assign(symbols - 1, {0.0, 1.0});
  fam.make = [symbols](std::span<const double> t) -> std::optional<MeasureSpec> {
    std::vector<double> probs(t.begin(), t.end());
    double rest = 1;
    for (double p : probs) {
      if (p < 0) return std::nullopt;
      rest -= p;
    }
    if (rest < -1e-15) return std::nullopt;
    probs.push_back(std::max(rest, 0.0));
    (void)symbols;
    return Bernoulli{std::move(probs)};
  };
  return fam;
}

namespace {

// h(mu) + integral of f, or -inf when mu charges forbidden words.
double objective(const Subshift& x, const LocallyConstantPotential& f, const MeasureSpec& mu) {
  if (!x.is_full()) {
    const int len = std::max(x.z_range(), 1) + 1;
    const FiniteSubset w = z_interval(0, len - 1);
    double bad = 0;
    for (const auto& [vals, p] : marginal(mu, w, x.alphabet_size()).probs)
      if (!admissible(x, Pattern(w, vals))) bad += p;
    if (bad > 1e-15) return -std::numeric_limits<double>::infinity();
  }
  return measure_entropy(mu) + integral(mu, f);
}

}  // namespace

EquilibriumResult equilibrium_search_Z(const Subshift& x, const LocallyConstantPotential& f,
                                       const MeasureFamily& family, int grid_points, double tol) {
  if (family.box.empty()) throw PreconditionError("measure family has no parameters");
  if (!x.over_z()) throw UnsupportedShape("equilibrium search runs over Z");
  if (grid_points < 2) throw PreconditionError("grid needs at least two points per axis");
  const std::size_t d = family.box.size();
  auto eval = [&](const std::vector<double>& t) {
    auto mu = family.make(t);
    if (!mu) return -std::numeric_limits<double>::infinity();
    return objective(x, f, *mu);
  };
  std::vector<double> best_t;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(d, 0);
  std::vector<double> t(d);
  // Lexicographic sweep; strict improvement keeps the lowest tuple on ties.
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto [lo, hi] = family.box[i];
      t[i] = lo + (hi - lo) * idx[i] / (grid_points - 1);
    }
    const double v = eval(t);
    if (v > best) best = v, best_t = t;
    std::size_t i = d;
    while (i-- > 0) {
      if (++idx[i] < grid_points) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  if (best_t.empty()) throw PreconditionError("no feasible measure in the family");
  // Cyclic golden-section refinement around the grid optimum.
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double moved = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto [lo, hi] = family.box[i];
      const double step = (hi - lo) / (grid_points - 1);
      double a = std::max(lo, best_t[i] - step), b = std::min(hi, best_t[i] + step);
      auto at = [&](double s) {
        auto u = best_t;
        u[i] = s;
        return eval(u);
      };
      double c = b - phi * (b - a), e = a + phi * (b - a);
      double fc = at(c), fe = at(e);
      while (b - a > tol) {
        if (fc >= fe) {
          b = e, e = c, fe = fc;
          c = b - phi * (b - a), fc = at(c);
        } else {
          a = c, c = e, fc = fe;
          e = a + phi * (b - a), fe = at(e);
        }
      }
      const double cand = 0.5 * (a + b);
      const double fv = at(cand);
      if (fv > best) {
        moved = std::max(moved, std::abs(cand - best_t[i]));
        best = fv;
        best_t[i] = cand;
      }
    }
    if (moved <= tol) break;
  }
  // The objective is flat at the top, so comparing values pins the argmax
  // only to about sqrt(eps). Bisect on the sign of a central difference to
  // place it where the derivative vanishes.
  constexpr double h = 1e-6, reach = 1e-5;
  for (std::size_t i = 0; i < d; ++i) {
    const auto [lo, hi] = family.box[i];
    auto slope = [&](double s) {
      auto u = best_t, v = best_t;
      u[i] = s - h;
      v[i] = s + h;
      return (eval(v) - eval(u)) / (2 * h);
    };
    double a = best_t[i] - reach, b = best_t[i] + reach;
    if (a - h < lo || b + h > hi) continue;
    double sa = slope(a), sb = slope(b);
    if (!(sa > 0 && sb < 0)) continue;
    for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
      const double m = 0.5 * (a + b);
      const double sm = slope(m);
      if (!std::isfinite(sm)) break;
      (sm > 0 ? a : b) = m;
    }
    auto u = best_t;
    u[i] = 0.5 * (a + b);
    const double fv = eval(u);
    if (fv >= best - 1e-14 * std::max(1.0, std::abs(best))) best_t = u, best = std::max(best, fv);
  }
  return {best_t, *family.make(best_t), best};
}

std::vector<Pattern> homoclinic_elements(const Subshift& x, int radius) {
  if (!is_group_shift(x)) throw NotGroupShift("homoclinic elements need a group shift");
  if (radius < 0) throw PreconditionError("radius must be nonnegative");
  const int pad = std::max(x.z_range(), 1);
  const FiniteSubset w = z_interval(-radius, radius);
  const int len = 2 * radius + 1;
  if (std::pow(static_cast<double>(x.alphabet_size()), len) > kEnumerationCap)
    throw SizeLimit("homoclinic window too large to enumerate");
  std::vector<Pattern> out;
  std::vector<Symbol> digits(len, 0);
  do {
    // The identity configuration lies in X, so a zero-padded pattern that is
    // locally admissible extends by the identity on both sides.
    std::vector<Symbol> padded(pad, 0);
    padded.insert(padded.end(), digits.begin(), digits.end());
    padded.insert(padded.end(), pad, 0);
    if (locally_admissible(x, Pattern::z_word(-radius - pad, padded))) out.emplace_back(w, digits);
  } while (advance(digits, x.alphabet_size()));
  return out;
}

double haar_is_gibbs_check(const Subshift& x, int radius) {
  const MeasureSpec haar = make_haar(x);
  const auto zero = LocallyConstantPotential::zero(x.spec(), x.alphabet_size());
  double worst = 0;
  for (const auto& pair : etale_pairs(x, radius)) {
    const GibbsReport r = gibbs_ratio_residual(haar, zero, pair);
    if (r.singular) throw PreconditionError("Haar measure gave an admissible cylinder zero mass");
    worst = std::max(worst, *r.residual);
  }
  return worst;
}

}  // namespace soficlab
