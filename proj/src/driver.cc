#include "soficlab/driver.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "soficlab/error.h"
#include "soficlab/pressure.h"

namespace soficlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_count(long double v) {
  char buf[128];
  if (v == std::floor(v) && v < 1e30L) std::snprintf(buf, sizeof buf, "%.0Lf", v);
  else std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

std::string format_subset(const FiniteSubset& s) {
  std::string out;
  for (const auto& g : s) out += "(" + format_element(g) + ")";
  return out;
}

std::vector<SoficMap> models_for(const ExperimentConfig& c, const RunOptions& o) {
  ExperimentConfig cc = c;
  if (o.seed)
    for (auto& m : cc.models)
      if (!m.torus) m.seed = *o.seed;
  std::vector<SoficMap> out;
  for (auto& m : build_models(cc))
    if (!o.max_n || m.size() <= *o.max_n) out.push_back(std::move(m));
  return out;
}

FiniteSubset window_for(const ExperimentConfig& c, const RunOptions& o) {
  if (o.window_radius) {
    if (!c.group) throw PreconditionError("config has no 'group' line");
    return ball(*c.group, *o.window_radius);
  }
  return build_window(c);
}

std::vector<double> deltas_for(const ExperimentConfig& c, const RunOptions& o) {
  if (o.deltas) return *o.deltas;
  if (!c.deltas.empty()) return c.deltas;
  return {0.0};
}

Table pressure_table(const ExperimentConfig& c, const RunOptions& o, bool zero_potential, const std::string& name,
                     RunReport& report) {
  const Subshift x = build_subshift(c);
  const LocallyConstantPotential f =
      zero_potential ? LocallyConstantPotential::zero(x.spec(), x.alphabet_size()) : build_potential(c);
  const FiniteSubset window = window_for(c, o);
  const bool sis = c.mode.value_or("exact") == "sis";
  const std::uint64_t seed = o.seed.value_or(0);
  Table t{name, {"n", "delta", "window", "mode", "count_or_weight", "pressure", "stderr", "seed", "wall_ms"}, {}, {{"n", "pressure"}}};
  for (const auto& sigma : models_for(c, o)) {
    if (sigma.provenance() == Provenance::RandomPerm) report.seeds.push_back(sigma.seed());
    for (double d : deltas_for(c, o)) {
      const auto start = std::chrono::steady_clock::now();
      PressureResult r;
      if (sis) {
        SisOptions so;
        so.samples = c.samples.value_or(10000);
        so.seed = seed;
        so.threads = o.threads;
        r = estimate_pressure_sis(x, sigma, f, d, window, so);
      } else {
        r = enumerate_pressure(x, sigma, f, d, window);
      }
      const double ms =
          o.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() : 0.0;
      const std::uint64_t row_seed = sis ? seed : sigma.seed();
      t.rows.push_back({std::to_string(r.n), format_number(d), format_subset(window), sis ? "sis" : "exact",
                        format_count(r.count), format_number(r.value), format_number(r.stderr_value),
                        std::to_string(row_seed), format_number(std::round(ms * 1000) / 1000)});
    }
  }
  if (sis) report.seeds.push_back(seed);
  return t;
}

std::string verdict_name(InterchangeVerdict::Outcome o) { return to_string(o); }

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"pressure", "entropy", "gibbs-check", "tmp-check",
                                              "interchange", "sofic-gen", "phat", "equilibrium"};
  return names;
}

RunReport run(const ExperimentConfig& c, const std::string& sub, const RunOptions& o) {
  RunReport report;
  report.subcommand = sub;
  report.config_hash = fnv1a_hex(serialize_config(c));

  if (sub == "pressure" || sub == "entropy") {
    report.tables.push_back(pressure_table(c, o, sub == "entropy", sub, report));
  } else if (sub == "gibbs-check") {
    const Subshift x = build_subshift(c);
    const auto mu = build_measure(c, o.base_dir);
    if (!mu) throw PreconditionError("gibbs-check needs a 'measure' line");
    const LocallyConstantPotential f = build_potential(c);
    std::vector<AsymptoticPair> pairs;
    if (c.pattern_p && c.pattern_q) {
      AsymptoticPair pair(*c.pattern_p, *c.pattern_q);
      pair.etale_certificate = certify_etale(x, pair);
      pairs.push_back(std::move(pair));
    } else {
      pairs = etale_pairs(x, c.radius.value_or(1));
    }
    Table t{"gibbs", {"x", "y", "ratio", "cocycle", "residual", "etale"}, {}, std::nullopt};
    for (const auto& pair : pairs) {
      const GibbsReport g = gibbs_ratio_residual(*mu, f, pair);
      const auto outcome = pair.etale_certificate ? pair.etale_certificate->outcome : InterchangeVerdict::Outcome::Unknown;
      if (outcome == InterchangeVerdict::Outcome::Unknown) report.unknown = true;
      t.rows.push_back({format_pattern(pair.x(), x.alphabet()), format_pattern(pair.y(), x.alphabet()),
                        g.singular ? "singular" : format_number(g.ratio), format_number(g.cocycle),
                        g.residual ? format_number(*g.residual) : "singular", verdict_name(outcome)});
    }
    report.tables.push_back(std::move(t));
  } else if (sub == "tmp-check") {
    const Subshift x = build_subshift(c);
    const FiniteSubset a = c.memory_set.value_or(FiniteSubset{GroupElement::identity(x.spec())});
    const int max_r = c.memory_max_radius.value_or(3);
    const MemorySearchResult m = tmp_memory_search(x, a, max_r);
    std::string result = m.memory_set ? "found" : (m.unknown ? "unknown" : "none");
    if (!m.memory_set && m.unknown) report.unknown = true;
    Table t{"tmp", {"set", "max_radius", "result", "radius", "memory_set", "failing_p", "failing_q"}, {}, std::nullopt};
    t.rows.push_back({format_subset(a), std::to_string(max_r), result, std::to_string(m.radius),
                      m.memory_set ? format_subset(*m.memory_set) : "",
                      m.failing_pair ? format_pattern(m.failing_pair->first, x.alphabet()) : "",
                      m.failing_pair ? format_pattern(m.failing_pair->second, x.alphabet()) : ""});
    report.tables.push_back(std::move(t));
  } else if (sub == "interchange") {
    const Subshift x = build_subshift(c);
    if (!c.pattern_p || !c.pattern_q) throw PreconditionError("interchange needs 'pattern p' and 'pattern q' lines");
    const int r = c.radius.value_or(x.exact_interchange_radius().value_or(1));
    const InterchangeVerdict v = interchangeable(x, *c.pattern_p, *c.pattern_q, r);
    if (v.unknown()) report.unknown = true;
    Table t{"interchange", {"p", "q", "radius", "verdict", "witness"}, {}, std::nullopt};
    t.rows.push_back({format_pattern(*c.pattern_p, x.alphabet()), format_pattern(*c.pattern_q, x.alphabet()),
                      std::to_string(r), verdict_name(v.outcome), v.witness ? format_pattern(*v.witness, x.alphabet()) : ""});
    report.tables.push_back(std::move(t));
  } else if (sub == "sofic-gen") {
    if (!c.group) throw PreconditionError("config has no 'group' line");
    const int radius = o.window_radius.value_or(c.window_radius.value_or(1));
    const FiniteSubset f = ball(*c.group, radius);
    Table t{"goodness", {"n", "seed", "radius", "good", "fraction"}, {}, {{"n", "fraction"}}};
    for (const auto& sigma : models_for(c, o)) {
      const Fraction q = goodness_fraction(sigma, f);
      t.rows.push_back({std::to_string(sigma.size()), std::to_string(sigma.seed()), std::to_string(radius),
                        std::to_string(q.num), format_number(q.value())});
      if (sigma.provenance() == Provenance::RandomPerm) report.seeds.push_back(sigma.seed());
      std::string name = "model_n" + std::to_string(sigma.size());
      if (sigma.provenance() == Provenance::RandomPerm) name += "_seed" + std::to_string(sigma.seed());
      report.files[name + ".txt"] = write_model(sigma);
    }
    report.tables.push_back(std::move(t));
  } else if (sub == "phat") {
    const std::vector<double> cs = c.phat_c.empty() ? std::vector<double>{0.0} : c.phat_c;
    Table t{"phat", {"C", "argmax", "grid_argmax", "max_value", "phat_at_argmax"}, {}, {{"C", "argmax"}}};
    for (double cv : cs) {
      const double r = phat_argmax(cv);
      t.rows.push_back({format_number(cv), format_number(r), format_number(phat_grid_argmax(cv, std::max(100.0, 4 * r))),
                        format_number(std::log1p(std::exp(cv))), format_number(phat(r, cv))});
    }
    report.tables.push_back(std::move(t));
  } else if (sub == "equilibrium") {
    const Subshift x = build_subshift(c);
    const LocallyConstantPotential f = build_potential(c);
    const std::string fam_name = c.family.value_or("golden_mean");
    const MeasureFamily fam = fam_name == "golden_mean" ? golden_mean_family() : bernoulli_family(x.alphabet_size());
    const EquilibriumResult e = equilibrium_search_Z(x, f, fam);
    std::string params;
    for (std::size_t i = 0; i < e.params.size(); ++i) params += (i ? ";" : "") + format_number(e.params[i]);
    Table t{"equilibrium", {"family", "params", "value", "transfer_pressure", "entropy", "integral"}, {}, std::nullopt};
    t.rows.push_back({fam.name, params, format_number(e.value), format_number(transfer_pressure_Z(x, f)),
                      format_number(measure_entropy(e.measure)), format_number(integral(e.measure, f))});
    report.tables.push_back(std::move(t));
  } else {
    throw PreconditionError("unknown subcommand '" + sub + "'");
  }
  return report;
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const std::string& s = cells[i];
      if (s.find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char ch : s) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      } else {
        os << s;
      }
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

std::string emit_plotdata(const Table& t, const std::string& x_column, const std::string& y_column) {
  auto col = [&](const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw PreconditionError("table '" + t.name + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const std::size_t xi = col(x_column), yi = col(y_column);
  std::string out;
  for (const auto& r : t.rows) out += r[xi] + " " + r[yi] + "\n";
  return out;
}

std::string emit_plotdata(const Table& t) {
  if (!t.plot) throw PreconditionError("table '" + t.name + "' has no designated plot columns");
  return emit_plotdata(t, t.plot->first, t.plot->second);
}

std::string report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["subcommand"] = r.subcommand;
  j["version"] = r.version;
  j["config_hash"] = r.config_hash;
  j["seeds"] = r.seeds;
  j["unknown"] = r.unknown;
  std::vector<std::string> tables;
  for (const auto& t : r.tables) tables.push_back(t.name + ".csv");
  j["tables"] = tables;
  std::vector<std::string> files;
  for (const auto& [name, body] : r.files) files.push_back(name);
  j["files"] = files;
  return j.dump(2) + "\n";
}

}  // namespace soficlab
