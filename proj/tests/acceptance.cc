// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "soficlab/measure.h"
#include "soficlab/pressure.h"

using namespace soficlab;

namespace {

const GroupSpec kZ = GroupSpec::lattice(1);
const GroupSpec kF2 = GroupSpec::free_group(2);
const double kLogPhi = std::log(std::numbers::phi);

Pattern w(int lo, std::vector<Symbol> v) { return Pattern::z_word(lo, v); }

Subshift full_shift(int k) {
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back(std::to_string(i));
  return Subshift::full(kZ, names);
}

// Collects failure messages for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ |= !ok;
  }
  bool failed() const { return failed_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += "\n    " + f;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void full_shift_entropy(Check& c) {
  const auto zero_for = [](const Subshift& x) { return LocallyConstantPotential::zero(x.spec(), x.alphabet_size()); };
  for (int k : {2, 3}) {
    const auto x = full_shift(k);
    for (int n = 1; n <= 20; ++n) {
      const auto r = enumerate_pressure(x, build_torus({n}), zero_for(x), 1.0, ball(kZ, 1));
      c.expect(std::abs(r.value - std::log(k)) <= 1e-12, "torus n=" + std::to_string(n) + " gave " + num(r.value));
    }
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back(std::to_string(i));
    const auto xf = Subshift::full(kF2, names);
    for (std::size_t n = 1; n <= 16; ++n) {
      const auto r = enumerate_pressure(xf, build_random_perm(2, n, 1000 + n), zero_for(xf), 1.0, ball(kF2, 1));
      c.expect(std::abs(r.value - std::log(k)) <= 1e-12, "random n=" + std::to_string(n) + " gave " + num(r.value));
    }
  }
}

void single_site_pressure(Check& c) {
  const auto f = LocallyConstantPotential::single_site(kZ, {0.0, std::log(2.0)});
  const auto x = full_shift(2);
  for (int n = 1; n <= 20; ++n)
    for (double delta : {0.0, 1.0}) {
      const double v = enumerate_pressure(x, build_torus({n}), f, delta, ball(kZ, 1)).value;
      c.expect(std::abs(v - std::log(3.0)) <= 1e-12, "torus n=" + std::to_string(n) + " gave " + num(v));
    }
  const auto xf = Subshift::full(kF2, {"0", "1"});
  const auto ff = LocallyConstantPotential::single_site(kF2, {0.0, std::log(2.0)});
  for (std::size_t n = 2; n <= 14; n += 3) {
    const double v = enumerate_pressure(xf, build_random_perm(2, n, 7), ff, 0.0, ball(kF2, 1)).value;
    c.expect(std::abs(v - std::log(3.0)) <= 1e-12, "random n=" + std::to_string(n) + " gave " + num(v));
  }

  const auto eq = equilibrium_search_Z(x, f, bernoulli_family(2));
  c.expect(std::abs(eq.params[0] - 1.0 / 3) <= 1e-6, "equilibrium p0 = " + num(eq.params[0]));
  c.expect(std::abs(eq.value - std::log(3.0)) <= 1e-9, "equilibrium value = " + num(eq.value));

  const auto mu = gibbs_bernoulli(f);
  std::mt19937 rng(2);
  for (int i = 0; i < 100; ++i) {
    std::vector<Symbol> xv(9);
    for (auto& s : xv) s = static_cast<Symbol>(rng() % 2);
    auto yv = xv;
    const std::size_t at = rng() % xv.size();
    yv[at] ^= 1;
    const auto r = gibbs_ratio_residual(mu, f, AsymptoticPair(w(-4, xv), w(-4, yv)));
    c.expect(r.residual && *r.residual == 0, "flip residual " + num(r.residual.value_or(-1)));
  }
}

void golden_mean_counts(Check& c) {
  const auto gm = Subshift::golden_mean();
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  for (int n = 4; n <= 12; ++n) {
    long brute = 0;
    for (unsigned m = 0; m < (1u << n); ++m) {
      const unsigned rot = ((m >> 1) | ((m & 1u) << (n - 1)));
      brute += (m & rot) == 0;
    }
    const auto r = enumerate_pressure(gm, build_torus({n}), zero, 0.0, ball(kZ, 1));
    c.expect(r.count == brute, "n=" + std::to_string(n) + " count " + num(static_cast<double>(r.count)) +
                                   " vs " + std::to_string(brute));
  }
  const long expected[][2] = {{4, 7}, {5, 11}, {6, 18}, {12, 322}};
  for (const auto& [n, count] : expected)
    c.expect(enumerate_pressure(gm, build_torus({static_cast<int>(n)}), zero, 0.0, ball(kZ, 1)).count == count,
             "Lucas number at n=" + std::to_string(n));
  const double v24 = enumerate_pressure(gm, build_torus({24}), zero, 0.0, ball(kZ, 1)).value;
  const double tp = transfer_pressure_Z(gm, zero);
  c.expect(std::abs(tp - kLogPhi) <= 1e-12, "transfer pressure " + num(tp));
  c.expect(std::abs(v24 - tp) <= 1e-3, "n=24 value " + num(v24));
}

LocallyConstantPotential random_potential(std::mt19937& rng, const FiniteSubset& window) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  return LocallyConstantPotential::from_function(window, 2, [&](const std::vector<Symbol>&) { return u(rng); });
}

void pressure_identities(Check& c) {
  std::mt19937 rng(4);
  const auto gm = Subshift::golden_mean();
  const auto window = ball(kZ, 1);
  for (int seg = 0; seg < 20; ++seg) {
    const auto sigma = build_torus({5 + seg % 8});
    const double delta = 0.15 * (seg % 3);
    const auto f = random_potential(rng, z_set({0, 1}));
    const auto g = random_potential(rng, z_set({-1, 0, 1}));
    auto P = [&](const LocallyConstantPotential& h) { return enumerate_pressure(gm, sigma, h, delta, window).value; };
    const double pf = P(f), pg = P(g);
    const double shift = std::uniform_real_distribution<double>(-4, 4)(rng);
    c.expect(std::abs(P(f.plus(shift)) - (pf + shift)) <= 1e-12, "constant shift");
    c.expect(std::abs(pf - pg) <= sup_distance(f, g) + 1e-12, "Lipschitz");
    const auto above = combine(f, g, 1, 0).plus(0);
    const auto raised = LocallyConstantPotential::from_function(above.window(), 2, [&](const std::vector<Symbol>& v) {
      return above.at_code(above.code(v)) + std::uniform_real_distribution<double>(0, 1)(rng);
    });
    c.expect(P(raised) >= pf - 1e-12, "monotonicity");
    std::vector<double> vals;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) vals.push_back(P(combine(f, g, t, 1 - t)));
    for (int i = 1; i < 4; ++i) c.expect(vals[i] <= (vals[i - 1] + vals[i + 1]) / 2 + 1e-12, "convexity");
  }
}

void easy_direction(Check& c) {
  std::mt19937 rng(5);
  const auto gm = Subshift::golden_mean();
  const auto window = z_set({0, 1});
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXd p(2, 2);
    const double a = u(rng), b = std::uniform_real_distribution<double>(0.7, 0.98)(rng);
    p << 1 - a, a, b, 1 - b;
    const auto mu = make_markov(p);
    const double charged = cylinder_prob(mu, w(0, {1, 1}));
    const double delta = std::min(1.0, charged + std::uniform_real_distribution<double>(0.02, 0.3)(rng));
    const double dp = easy_direction_delta(gm, mu, delta, window);
    c.expect(dp >= 0, "no admissible neighbourhood for delta " + num(delta));
    const auto f = random_potential(rng, z_set({0}));
    const auto sigma = build_torus({6 + i % 7});
    const double lhs = pressure_measure_neighborhood(gm, sigma, f, mu, dp, window).value;
    const double rhs = enumerate_pressure(gm, sigma, f, delta, window).value;
    c.expect(lhs <= rhs + 1e-12, "instance " + std::to_string(i) + ": " + num(lhs) + " > " + num(rhs));
  }
}

// Random (x, y) agreeing off F1 = {0} with trivial overlaps.
Exchange random_exchange(std::mt19937& rng) {
  while (true) {
    const int symbols = 2 + static_cast<int>(rng() % 2);
    const int r = symbols == 2 ? 2 : 1 + static_cast<int>(rng() % 2);
    std::vector<Symbol> xv(2 * r + 1);
    for (auto& s : xv) s = static_cast<Symbol>(rng() % symbols);
    auto yv = xv;
    yv[r] = static_cast<Symbol>((xv[r] + 1 + rng() % (symbols - 1)) % symbols);
    Exchange e{w(-r, xv), w(-r, yv), z_set({0}), z_interval(-r, r)};
    if (has_trivial_overlaps(e.x, e.y, e.f1, e.f2)) return e;
  }
}

int symbols_of(const Exchange& e) {
  Symbol m = 0;
  for (Symbol s : e.x.values()) m = std::max(m, s);
  for (Symbol s : e.y.values()) m = std::max(m, s);
  return m + 1 > 2 ? 3 : 2;
}

void exchange_machinery(Check& c) {
  std::mt19937 rng(6);
  int sandwiches = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const Exchange e = random_exchange(rng);
    const int k = symbols_of(e);
    const int len = k == 2 ? 12 : 8;
    std::vector<Symbol> cfg(len, 0);
    // Every configuration on the window.
    while (true) {
      const Pattern zp = w(0, cfg);
      const Pattern out = exchange_map_apply(e, zp);
      const FiniteSubset& inner = out.support();
      for (int g = -2; g < len + 2; ++g) {
        const FiniteSubset cells = translate(z(g), e.f2);
        if (!cells.is_subset_of(inner)) continue;
        const Pattern read = shift_pattern(z(-g), zp.restrict_to(cells));
        const Pattern after = shift_pattern(z(-g), out.restrict_to(cells));
        if (read == e.x || read == e.y) c.expect(after == e.x, "copy not replaced by x");
        c.expect(after != e.y, "y survives the exchange");
      }
      int i = 0;
      while (i < len && cfg[i] == k - 1) cfg[i++] = 0;
      if (i == len) break;
      ++cfg[i];
    }

    // Model level: idempotence and the preimage sandwich.
    const int width = static_cast<int>(e.f2.size());
    const int n = k == 2 ? 9 + inst % 4 : (width == 3 ? 7 + inst % 2 : 10);
    const SoficMap sigma = build_torus({n});
    const Subshift x = full_shift(k);
    // Random backgrounds with planted copies of x, so that x occurs often enough.
    Microstate target;
    std::size_t g_size = 0;
    for (int attempt = 0; attempt < 100 && (g_size < 2 || g_size > 12); ++attempt) {
      Microstate base;
      for (int v = 0; v < n; ++v) base.values.push_back(static_cast<Symbol>(rng() % k));
      for (int at = static_cast<int>(rng() % 2); at + width <= n; at += width + static_cast<int>(rng() % 2)) {
        const auto cells = pullback_cells(sigma, static_cast<Vertex>(at + width / 2), e.f2);
        for (std::size_t j = 0; j < cells.size(); ++j) base.values[cells[j]] = e.x.values()[j];
      }
      target = microstate_exchange(sigma, base, e);
      c.expect(microstate_exchange(sigma, target, e) == target, "microstate exchange not idempotent");
      c.expect(empirical(sigma, target, e.f2).frequency(e.y.values()) == 0, "pulled-back y survives");
      g_size = 0;
      for (Vertex v = 0; v < sigma.size(); ++v) g_size += pullback(sigma, target, v, e.f2) == e.x;
    }
    c.expect(g_size >= 2 && g_size <= 12, "could not build a target with 2 to 12 copies of x");
    if (g_size < 2 || g_size > 12) continue;
    ++sandwiches;
    const std::size_t k0 = 1 + rng() % (g_size - 1);
    const double r = static_cast<double>(k0) / static_cast<double>(g_size - k0) + 1e-9;
    const double delta = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    const ExchangeConstraint con{&x, {}, delta, r, static_cast<double>(g_size) / n};
    const auto count = count_exchange_preimages(sigma, target, e, con);
    const auto bounds = exchange_count_bounds(count.g_size, r, delta);
    c.expect(bounds.lower <= static_cast<double>(count.count) && static_cast<double>(count.count) <= bounds.upper,
             "sandwich " + num(bounds.lower) + " <= " + std::to_string(count.count) + " <= " + num(bounds.upper));
    // Exhaustive oracle over every microstate.
    std::uint64_t brute = 0;
    Microstate m{std::vector<Symbol>(n, 0)};
    while (true) {
      if (microstate_exchange(sigma, m, e) == target && in_exchange_neighborhood(sigma, m, e, con)) ++brute;
      int i = 0;
      while (i < n && m.values[i] == k - 1) m.values[i++] = 0;
      if (i == n) break;
      ++m.values[i];
    }
    c.expect(brute == count.count, "exhaustive count " + std::to_string(brute) + " vs " + std::to_string(count.count));
  }
  c.expect(sandwiches == 50, "only " + std::to_string(sandwiches) + " preimage counts checked");
}

void phat_analytics(Check& c) {
  for (int i = 0; i <= 24; ++i) {
    const double cc = -3 + 0.25 * i;
    const double r = phat_argmax(cc);
    c.expect(std::abs(r - std::exp(cc)) <= 1e-9, "argmax at C=" + num(cc));
    c.expect(std::abs(phat(r, cc) - std::log1p(std::exp(cc))) <= 1e-9, "max value at C=" + num(cc));
    c.expect(std::abs(phat_grid_argmax(cc) - r) <= 1e-6 * std::max(1.0, r), "grid cross-check at C=" + num(cc));
  }
  for (std::uint64_t n = 2; n <= 10000; ++n)
    for (double a : {0.1, 0.25, 0.5, 0.73}) {
      const double k = std::floor(a * static_cast<double>(n));
      if (k < 1 || k > static_cast<double>(n) - 1) continue;
      const double g = stirling_gap(n, a);
      c.expect(g <= 1e-12 && g >= -std::log(static_cast<double>(n) + 1) - 1e-12, "gap at n=" + std::to_string(n));
    }
}

void tmp_suite(Check& c) {
  const auto gm = tmp_memory_search(Subshift::golden_mean(), z_set({0}), 3);
  c.expect(gm.memory_set && *gm.memory_set == z_set({-1, 0, 1}) && gm.radius == 1, "golden mean memory set");
  const auto sunny_x = Subshift::sunny_side_up(kZ);
  const auto sunny = tmp_memory_search(sunny_x, z_set({0}), 3);
  c.expect(!sunny.memory_set && !sunny.unknown, "sunny-side-up should have no memory set");
  c.expect(sunny.failing_pair.has_value(), "sunny-side-up failing pair missing");
  if (sunny.failing_pair) {
    const auto& [p, q] = *sunny.failing_pair;
    c.expect(admissible(sunny_x, p) && admissible(sunny_x, q), "failing pair not admissible");
    c.expect(interchangeable(sunny_x, p, q, 1).no(), "failing pair is interchangeable");
  }
  const auto full = tmp_memory_search(full_shift(2), z_set({0}), 3);
  c.expect(full.memory_set && *full.memory_set == z_set({0}), "full shift memory set");
}

void cocycle_suite(Check& c) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  auto random_word = [&](int lo, int len) {
    std::vector<Symbol> v(len);
    for (auto& s : v) s = static_cast<Symbol>(rng() % 2);
    return w(lo, v);
  };
  auto perturb = [&](const Pattern& p, int from, int to) {
    auto v = p.values();
    for (int i = from; i <= to; ++i)
      if (rng() % 2) v[i] ^= 1;
    return Pattern(p.support(), v);
  };
  for (int i = 0; i < 200; ++i) {
    const auto f = LocallyConstantPotential::from_function(i % 2 ? z_set({0, 1}) : z_set({-1, 0, 2}), 2,
                                                           [&](const std::vector<Symbol>&) { return u(rng); });
    const auto x = random_word(-8, 17);
    const auto y = perturb(x, 6, 10), zz = perturb(y, 6, 10);
    const double xy = psi_f(f, AsymptoticPair(x, y)), yz = psi_f(f, AsymptoticPair(y, zz));
    c.expect(std::abs(psi_f(f, AsymptoticPair(x, zz)) - xy - yz) <= 1e-12, "additivity");
    c.expect(std::abs(psi_f(f, AsymptoticPair(y, x)) + xy) <= 1e-12, "antisymmetry");
  }
  for (int i = 0; i < 100; ++i) {
    Interaction phi(kZ, 2);
    const int entries = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < entries; ++e) {
      std::vector<std::pair<GroupElement, Symbol>> cells{{z(0), static_cast<Symbol>(rng() % 2)}};
      int at = 0;
      for (int extra = static_cast<int>(rng() % 3); extra > 0; --extra) {
        at += 1 + static_cast<int>(rng() % 2);
        cells.emplace_back(z(at), static_cast<Symbol>(rng() % 2));
      }
      phi.add(Pattern::from_cells(cells), u(rng));
    }
    const auto x = random_word(-14, 29);
    AsymptoticPair pair(x, perturb(x, 13, 15));
    if (pair.diff().empty()) pair = AsymptoticPair(x, perturb(perturb(x, 14, 14), 14, 14));
    if (pair.diff().empty()) continue;
    const double a = psi_interaction(phi, pair);
    c.expect(std::abs(a - psi_f(f_from_interaction(phi), pair)) <= 1e-12, "f_Phi cocycle");
    c.expect(std::abs(a - psi_f(h_from_interaction(phi), pair)) <= 1e-12, "h_Phi cocycle");
    c.expect(std::abs(a) <= 2.0 * static_cast<double>(pair.diff().size()) * interaction_norm(phi) + 1e-12, "norm bound");
  }
}

void equilibrium_gibbs(Check& c) {
  const auto gm = Subshift::golden_mean();
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  const auto eq = equilibrium_search_Z(gm, zero, golden_mean_family());
  const double p_star = 1 / (std::numbers::phi * std::numbers::phi);
  c.expect(std::abs(eq.params[0] - p_star) <= 1e-6, "argmax " + num(eq.params[0]));
  c.expect(std::abs(eq.value - kLogPhi) <= 1e-6, "value " + num(eq.value));
  const auto pairs = etale_pairs(gm, 1);
  c.expect(!pairs.empty(), "no interchangeable pairs");
  for (const auto& pair : pairs) {
    const auto r = gibbs_ratio_residual(eq.measure, zero, pair);
    c.expect(!r.singular && *r.residual < 1e-9, "residual " + num(r.residual.value_or(-1)));
  }
  const auto parry = parry_measure(gm);
  c.expect(cylinder_prob(parry, w(0, {0, 0, 0})) == cylinder_prob(parry, w(0, {0, 1, 0})) ||
               std::abs(cylinder_prob(parry, w(0, {0, 0, 0})) - cylinder_prob(parry, w(0, {0, 1, 0}))) <= 1e-15,
           "Parry cylinders 000 and 010 differ");
}

void product_trick(Check& c) {
  const auto gm = Subshift::golden_mean();
  const auto prod = product_with_full_shift(gm, 2);
  for (int n = 2; n <= 12; ++n) {
    const auto sigma = build_torus({n});
    const auto a = enumerate_pressure(gm, sigma, LocallyConstantPotential::zero(kZ, 2), 0.0, ball(kZ, 1));
    const auto b = enumerate_pressure(prod, sigma, LocallyConstantPotential::zero(kZ, 4), 0.0, ball(kZ, 1));
    c.expect(b.count == a.count * std::ldexp(1.0L, n), "count at n=" + std::to_string(n));
    c.expect(std::abs(b.value - a.value - std::log(2.0)) <= 1e-12, "pressure at n=" + std::to_string(n));
  }
}

void group_shifts(Check& c) {
  for (int k : {2, 3}) {
    const double worst = haar_is_gibbs_check(full_shift(k), 1);
    c.expect(worst == 0, "Haar residual " + num(worst) + " for k=" + std::to_string(k));
  }
  const auto parity = Subshift::forbidden(kZ, {"0", "1"}, {w(0, {0, 1}), w(0, {1, 0})});
  c.expect(is_group_shift(parity), "parity shift not recognised as a group shift");
  for (int r = 1; r <= 3; ++r) {
    const auto h = homoclinic_elements(parity, r);
    c.expect(h.size() == 1 && h[0] == Pattern(z_interval(-r, r), std::vector<Symbol>(2 * r + 1, 0)),
             "homoclinic list at radius " + std::to_string(r));
  }
  c.expect(homoclinic_elements(full_shift(2), 1).size() == 8, "full shift homoclinic list");
}

void sofic_quality(Check& c) {
  for (int d = 1; d <= 2; ++d)
    for (int n = 1; n <= 9; ++n)
      for (int r = 0; r <= 4; ++r) {
        const auto sigma = build_torus(std::vector<int>(d, n));
        const bool all_good = goodness_fraction(sigma, ball(GroupSpec::lattice(d), r)).value() == 1.0;
        c.expect(all_good == (n >= 2 * r + 1),
                 "torus d=" + std::to_string(d) + " n=" + std::to_string(n) + " r=" + std::to_string(r));
      }
  int good_seeds = 0;
  double lowest = 1, highest = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double frac = goodness_fraction(build_random_perm(2, 2000, seed), ball(kF2, 2)).value();
    good_seeds += frac >= 0.99;
    lowest = std::min(lowest, frac), highest = std::max(highest, frac);
  }
  c.expect(good_seeds >= 19, std::to_string(good_seeds) + " of 20 random models reached 0.99 (fractions in [" +
                                 num(lowest) + ", " + num(highest) + "])");

  const auto gm = Subshift::golden_mean();
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  const auto sigma = build_torus({20});
  const auto exact = enumerate_pressure(gm, sigma, zero, 0.0, ball(kZ, 1));
  const auto est = estimate_pressure_sis(gm, sigma, zero, 0.0, ball(kZ, 1), SisOptions{10000, 1, 4});
  c.expect(std::abs(est.value - exact.value) <= 3 * est.stderr_value,
           "sampling " + num(est.value) + " +- " + num(est.stderr_value) + " vs " + num(exact.value));
}

struct Criterion {
  const char* name;
  std::function<void(Check&)> run;
  double limit_s;  // 0 when untimed
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"full-shift entropy is log|A| on every model", full_shift_entropy, 10},
      {"single-site pressure, equilibrium and Gibbs residuals", single_site_pressure, 0},
      {"golden-mean counts are Lucas numbers", golden_mean_counts, 60},
      {"pressure identities on finite models", pressure_identities, 0},
      {"easy direction of the variational principle", easy_direction, 0},
      {"exchange map, idempotence and preimage sandwich", exchange_machinery, 120},
      {"phat maximiser and Stirling gap", phat_analytics, 0},
      {"memory sets", tmp_suite, 0},
      {"cocycle identities and interaction bound", cocycle_suite, 0},
      {"equilibrium measure is Gibbs on the golden mean", equilibrium_gibbs, 0},
      {"product with the full 2-shift", product_trick, 0},
      {"Haar measures and homoclinic elements", group_shifts, 0},
      {"finite model quality and sampling accuracy", sofic_quality, 0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].limit_s > 0)
      check.expect(secs < criteria[i].limit_s, "took " + num(secs) + " s, limit " + num(criteria[i].limit_s) + " s");
    failed += check.failed();
    std::printf("[%s] %2zu. %s (%.2f s)%s\n", check.failed() ? "FAIL" : "PASS", i + 1, criteria[i].name, secs,
                check.summary().c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
