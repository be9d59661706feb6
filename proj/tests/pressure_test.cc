#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "soficlab/error.h"
#include "soficlab/pressure.h"

using namespace soficlab;

namespace {

const GroupSpec kZ = GroupSpec::lattice(1);
const GroupSpec kF2 = GroupSpec::free_group(2);

Pattern w(int lo, std::vector<Symbol> v) { return Pattern::z_word(lo, v); }

Subshift full2() { return Subshift::full(kZ, {"0", "1"}); }

// Hard-core constraint along the generator a of F_2.
Subshift hard_core_f2() {
  return Subshift::forbidden(kF2, {"0", "1"},
                             {Pattern::from_cells({{GroupElement::identity(kF2), 1}, {GroupElement::generator(kF2, 0), 1}})});
}

long double lucas(int n) {
  long double a = 2, b = 1;
  for (int i = 0; i < n; ++i) {
    const long double c = a + b;
    a = b;
    b = c;
  }
  return a;
}

// Every microstate, one at a time.
struct BruteForce {
  long double count = 0;
  double log_sum = -std::numeric_limits<double>::infinity();
};

BruteForce brute_pressure(const Subshift& x, const SoficMap& sigma, const LocallyConstantPotential& f, double delta,
                          const FiniteSubset& window) {
  const std::size_t n = sigma.size();
  const int k = x.alphabet_size();
  BruteForce out;
  Microstate m{std::vector<Symbol>(n, 0)};
  while (true) {
    const Fraction adm = admissible_fraction(sigma, m, x, window);
    if (static_cast<double>(adm.den - adm.num) <= delta * static_cast<double>(n) + 1e-9) {
      double s = 0;
      for (Vertex v = 0; v < n; ++v) s += eval_potential(f, pullback(sigma, m, v, f.window()));
      out.count += 1;
      const double hi = std::max(out.log_sum, s), lo = std::min(out.log_sum, s);
      out.log_sum = hi + std::log1p(std::exp(lo - hi));
    }
    std::size_t i = 0;
    while (i < n && m.values[i] == k - 1) m.values[i++] = 0;
    if (i == n) break;
    ++m.values[i];
  }
  return out;
}

LocallyConstantPotential random_potential(std::mt19937& rng, const FiniteSubset& window, int symbols) {
  std::uniform_real_distribution<double> u(-1, 1);
  return LocallyConstantPotential::from_function(window, symbols, [&](const std::vector<Symbol>&) { return u(rng); });
}

}  // namespace

TEST_CASE("exact pressure examples") {
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  for (int n = 1; n <= 20; ++n) {
    const auto r = enumerate_pressure(full2(), build_torus({n}), zero, 0.0, ball(kZ, 1));
    CHECK(r.count == std::ldexp(1.0L, n));
    CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(r.exact);
  }
  const auto f = LocallyConstantPotential::single_site(kZ, {0.0, std::log(2.0)});
  CHECK(enumerate_pressure(full2(), build_torus({9}), f, 1.0, ball(kZ, 1)).value ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
  const auto gm5 = enumerate_pressure(Subshift::golden_mean(), build_torus({5}), zero, 0.0, ball(kZ, 1));
  CHECK(gm5.count == 11);
  CHECK(gm5.value == doctest::Approx(std::log(11.0) / 5).epsilon(1e-14));

  const auto empty = Subshift::forbidden(kZ, {"0", "1"}, {w(0, {0}), w(0, {1})});
  const auto none = enumerate_pressure(empty, build_torus({4}), zero, 0.0, ball(kZ, 1));
  CHECK(none.count == 0);
  CHECK(none.value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("exact pressure matches brute force on tori and random models") {
  std::mt19937 rng(2024);
  const auto gm = Subshift::golden_mean();
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 8;
    const auto sigma = build_torus({n});
    const double delta = (trial % 4) * 0.2;
    const auto f = random_potential(rng, trial % 2 ? z_set({0, 1}) : z_set({-1, 0, 1}), 2);
    const auto window = trial % 3 ? ball(kZ, 1) : z_set({0, 1});
    const auto exact = enumerate_pressure(gm, sigma, f, delta, window);
    const auto brute = brute_pressure(gm, sigma, f, delta, window);
    CHECK(exact.count == brute.count);
    CHECK(exact.log_partition == doctest::Approx(brute.log_sum).epsilon(1e-12));
  }
  const auto hc = hard_core_f2();
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 4 + trial % 6;
    const auto sigma = build_random_perm(2, n, 100 + trial);
    const auto f = random_potential(rng, FiniteSubset({GroupElement::identity(kF2), GroupElement::generator(kF2, 1)}), 2);
    const double delta = trial % 2 ? 0.25 : 0.0;
    const auto exact = enumerate_pressure(hc, sigma, f, delta, ball(kF2, 1));
    const auto brute = brute_pressure(hc, sigma, f, delta, ball(kF2, 1));
    CHECK(exact.count == brute.count);
    CHECK(exact.log_partition == doctest::Approx(brute.log_sum).epsilon(1e-12));
  }
  // Three symbols on a 2-torus.
  const auto three = Subshift::forbidden(GroupSpec::lattice(2), {"a", "b", "c"},
                                         {Pattern::from_cells({{GroupElement::lattice({0, 0}), 0},
                                                               {GroupElement::lattice({1, 0}), 0}})});
  const auto t = build_torus({2, 3});
  const auto f3 = random_potential(rng, FiniteSubset({GroupElement::lattice({0, 0})}), 3);
  for (double delta : {0.0, 0.5}) {
    const auto exact = enumerate_pressure(three, t, f3, delta, ball(GroupSpec::lattice(2), 1));
    const auto brute = brute_pressure(three, t, f3, delta, ball(GroupSpec::lattice(2), 1));
    CHECK(exact.count == brute.count);
    CHECK(exact.log_partition == doctest::Approx(brute.log_sum).epsilon(1e-12));
  }
}

TEST_CASE("pressure identities") {
  std::mt19937 rng(99);
  const auto gm = Subshift::golden_mean();
  const auto window = ball(kZ, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sigma = build_torus({6 + trial % 5});
    const double delta = 0.1 * (trial % 3);
    const auto f = random_potential(rng, z_set({0, 1}), 2);
    const auto g = random_potential(rng, z_set({-1, 0}), 2);
    const double pf = enumerate_pressure(gm, sigma, f, delta, window).value;
    const double pg = enumerate_pressure(gm, sigma, g, delta, window).value;

    const double c = std::uniform_real_distribution<double>(-3, 3)(rng);
    CHECK(enumerate_pressure(gm, sigma, f.plus(c), delta, window).value == doctest::Approx(pf + c).epsilon(1e-12));

    CHECK(std::abs(pf - pg) <= sup_distance(f, g) + 1e-12);

    const auto bigger = combine(f, LocallyConstantPotential::constant(kZ, 2, 0.0), 1, 1).plus(0.0);
    const auto larger = LocallyConstantPotential::from_function(f.window(), 2, [&](const std::vector<Symbol>& v) {
      return f.at_code(f.code(v)) + std::uniform_real_distribution<double>(0, 0.5)(rng);
    });
    CHECK(enumerate_pressure(gm, sigma, bigger, delta, window).value == doctest::Approx(pf).epsilon(1e-12));
    CHECK(enumerate_pressure(gm, sigma, larger, delta, window).value >= pf - 1e-12);

    std::vector<double> curve;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      curve.push_back(enumerate_pressure(gm, sigma, combine(f, g, t, 1 - t), delta, window).value);
    for (int i = 1; i + 1 < 5; ++i) CHECK(curve[i] <= (curve[i - 1] + curve[i + 1]) / 2 + 1e-12);
  }
}

TEST_CASE("monotone in delta and the pressure curve") {
  const auto gm = Subshift::golden_mean();
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  std::vector<SoficMap> tori;
  for (int n = 4; n <= 24; ++n) tori.push_back(build_torus({n}));
  const auto rows = pressure_curve(gm, tori, zero, {0.0}, ball(kZ, 1));
  REQUIRE(rows.size() == tori.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int n = static_cast<int>(i) + 4;
    CHECK(rows[i].count == lucas(n));
    CHECK(rows[i].value == doctest::Approx(std::log(static_cast<double>(lucas(n))) / n).epsilon(1e-13));
    // L_n = phi^n + (-1/phi)^n, so the values straddle log phi and close in.
    const double gap = rows[i].value - std::log(std::numbers::phi);
    CHECK((n % 2 == 0 ? gap > 0 : gap < 0));
    CHECK(std::abs(gap) <= 2 * std::pow(std::numbers::phi, -2 * n) / n);
  }

  const auto full_rows = pressure_curve(full2(), {build_torus({5}), build_torus({8})}, zero, {0.0, 0.5}, ball(kZ, 1));
  REQUIRE(full_rows.size() == 4);
  CHECK(full_rows[0].n == 5);
  CHECK(full_rows[1].delta == 0.5);
  for (const auto& r : full_rows) CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  const auto f = LocallyConstantPotential::single_site(kZ, {0.3, -0.2});
  double last = -std::numeric_limits<double>::infinity();
  for (double delta : {0.0, 0.1, 0.2, 0.3, 0.5, 1.0}) {
    const double v = enumerate_pressure(gm, build_torus({10}), f, delta, ball(kZ, 1)).value;
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("product with the full shift adds log 2") {
  const auto gm = Subshift::golden_mean();
  const auto prod = product_with_full_shift(gm, 2);
  CHECK(prod.alphabet_size() == 4);
  CHECK(prod.alphabet()[3] == "1/1");
  const auto f = LocallyConstantPotential::single_site(kZ, {0.2, -0.4});
  for (int n = 3; n <= 9; ++n) {
    const auto sigma = build_torus({n});
    const auto base = enumerate_pressure(gm, sigma, LocallyConstantPotential::zero(kZ, 2), 0.0, ball(kZ, 1));
    const auto lifted = enumerate_pressure(prod, sigma, LocallyConstantPotential::zero(kZ, 4), 0.0, ball(kZ, 1));
    CHECK(lifted.count == base.count * std::ldexp(1.0L, n));
    const double pf = enumerate_pressure(gm, sigma, f, 0.0, ball(kZ, 1)).value;
    const double pl = enumerate_pressure(prod, sigma, lift_to_product(f, 2), 0.0, ball(kZ, 1)).value;
    CHECK(pl == doctest::Approx(pf + std::log(2.0)).epsilon(1e-13));
  }
}

TEST_CASE("sequential importance sampling") {
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  SisOptions opt{200, 5, 1};
  const auto r = estimate_pressure_sis(full2(), build_torus({16}), zero, 0.0, ball(kZ, 1), opt);
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(r.stderr_value == 0);
  CHECK_FALSE(r.exact);
  CHECK(r.samples == 200);

  const auto f = LocallyConstantPotential::single_site(kZ, {0.7, -1.1});
  const auto s = estimate_pressure_sis(full2(), build_torus({12}), f, 0.0, ball(kZ, 1), opt);
  CHECK(s.value == doctest::Approx(std::log(std::exp(0.7) + std::exp(-1.1))).epsilon(1e-12));
  CHECK(s.stderr_value <= 1e-12);

  // Golden mean at n = 20 against the exact value.
  const auto gm = Subshift::golden_mean();
  const auto sigma = build_torus({20});
  const auto exact = enumerate_pressure(gm, sigma, zero, 0.0, ball(kZ, 1));
  const auto est = estimate_pressure_sis(gm, sigma, zero, 0.0, ball(kZ, 1), SisOptions{10000, 1, 4});
  CHECK(std::abs(est.value - exact.value) <= 3 * est.stderr_value);
  CHECK(est.stderr_value > 0);

  // Thread count does not change the estimate.
  const auto one = estimate_pressure_sis(gm, sigma, zero, 0.0, ball(kZ, 1), SisOptions{2000, 3, 1});
  const auto four = estimate_pressure_sis(gm, sigma, zero, 0.0, ball(kZ, 1), SisOptions{2000, 3, 4});
  CHECK(one.value == doctest::Approx(four.value).epsilon(1e-13));
  CHECK(one.seed == 3);
}

TEST_CASE("importance sampling is unbiased") {
  const auto gm = Subshift::golden_mean();
  const auto f = LocallyConstantPotential::from_function(z_set({0, 1}), 2, [](const std::vector<Symbol>& v) {
    return 0.3 * v[0] - 0.2 * v[1];
  });
  const auto sigma = build_torus({10});
  for (double delta : {0.0, 0.2}) {
    const auto exact = enumerate_pressure(gm, sigma, f, delta, ball(kZ, 1));
    const double z = std::exp(exact.log_partition);
    const int seeds = 400;
    double sum = 0, sum2 = 0;
    for (int s = 0; s < seeds; ++s) {
      const auto r = estimate_pressure_sis(gm, sigma, f, delta, ball(kZ, 1), SisOptions{50, static_cast<std::uint64_t>(s), 1});
      const double zs = std::exp(r.log_partition);
      sum += zs;
      sum2 += zs * zs;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt((sum2 / seeds - mean * mean) / (seeds - 1));
    CHECK(std::abs(mean - z) <= 3 * se);
  }
}

TEST_CASE("measure neighbourhoods") {
  const auto zero = LocallyConstantPotential::zero(kZ, 2);
  const auto site = z_set({0});
  const auto balanced = pressure_measure_neighborhood(full2(), build_torus({8}), zero, make_bernoulli({0.5, 0.5}), 0.0, site);
  CHECK(balanced.count == 70);
  CHECK(balanced.value == doctest::Approx(std::log(70.0) / 8).epsilon(1e-14));

  const auto point = pressure_measure_neighborhood(full2(), build_torus({8}), zero, make_bernoulli({1.0, 0.0}), 0.0, site);
  CHECK(point.count == 1);
  CHECK(point.value == 0);

  for (int n = 4; n <= 10; ++n) {
    const auto sigma = build_torus({n});
    CHECK(pressure_measure_neighborhood(full2(), sigma, zero, make_bernoulli({0.5, 0.5}), 0.5, site).value <=
          enumerate_pressure(full2(), sigma, zero, 0.5, site).value + 1e-15);
  }

  // Easy direction on the golden mean with a measure that charges 11.
  const auto gm = Subshift::golden_mean();
  Eigen::MatrixXd p(2, 2);
  p << 0.6, 0.4, 0.9, 0.1;
  const auto mu = make_markov(p);
  const auto window = z_set({0, 1});
  for (double delta : {0.1, 0.2, 0.3}) {
    const double dp = easy_direction_delta(gm, mu, delta, window);
    REQUIRE(dp >= 0);
    for (int n = 5; n <= 10; ++n) {
      const auto sigma = build_torus({n});
      const auto f = LocallyConstantPotential::single_site(kZ, {0.1, 0.4});
      CHECK(pressure_measure_neighborhood(gm, sigma, f, mu, dp, window).value <=
            enumerate_pressure(gm, sigma, f, delta, window).value + 1e-12);
    }
  }
  CHECK(easy_direction_delta(gm, mu, 0.01, window) < 0);
}

TEST_CASE("phat and the Stirling sandwich") {
  CHECK(phat(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(phat_argmax(std::log(2.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(phat(2, std::log(2.0)) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  for (double c : {-2.0, 0.0, 1.5}) CHECK(phat(0, c) == 0);
  CHECK_THROWS(phat(-1, 0));
  for (double c : {-1.0, 0.0, std::log(2.0), 2.0}) {
    CHECK(std::abs(phat_grid_argmax(c) - std::exp(c)) <= 1e-6);
    CHECK(phat(std::exp(c), c) == doctest::Approx(std::log1p(std::exp(c))).epsilon(1e-14));
  }
  CHECK(entropy_H(0) == 0);
  CHECK(entropy_H(1) == 0);
  CHECK(entropy_H(0.5) == doctest::Approx(std::log(2.0)));

  const double g10 = stirling_gap(10, 0.5);
  CHECK(g10 == doctest::Approx(std::log(252.0) - 10 * std::log(2.0)).epsilon(1e-12));
  CHECK(g10 == doctest::Approx(-1.402).epsilon(1e-3));
  const double g4 = stirling_gap(4, 0.25);
  CHECK(g4 < 0);
  CHECK(g4 >= -std::log(5.0));
  for (std::uint64_t n : {2ULL, 7ULL, 50ULL, 999ULL, 10000ULL})
    for (double a : {0.1, 0.37, 0.5, 0.9}) {
      if (std::floor(a * static_cast<double>(n)) < 1) continue;
      const double g = stirling_gap(n, a);
      CHECK(g <= 1e-12);
      CHECK(g >= -std::log(static_cast<double>(n) + 1) - 1e-12);
    }
  CHECK_THROWS(stirling_gap(10, 0.05));
  CHECK_THROWS(stirling_gap(10, 1.0));
}
