#include "soficlab/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "soficlab/error.h"

namespace soficlab {

namespace {

struct Token {
  std::string text;
  int column = 1;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class LineParser {
 public:
  LineParser(int line, std::vector<Token> tokens) : line_(line), tokens_(std::move(tokens)) {}

  [[noreturn]] void fail(std::size_t i, const std::string& what) const {
    const int col = i < tokens_.size() ? tokens_[i].column
                                       : (tokens_.empty() ? 1 : tokens_.back().column + static_cast<int>(tokens_.back().text.size()));
    throw ParseError(line_, col, what);
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& text(std::size_t i) const {
    if (i >= tokens_.size()) fail(i, "missing argument");
    return tokens_[i].text;
  }
  void arity(std::size_t n) const {
    if (tokens_.size() < n) fail(tokens_.size(), "too few arguments to '" + tokens_[0].text + "'");
    if (tokens_.size() > n) fail(n, "too many arguments to '" + tokens_[0].text + "'");
  }
  void at_least(std::size_t n) const {
    if (tokens_.size() < n) fail(tokens_.size(), "too few arguments to '" + tokens_[0].text + "'");
  }

  double number(std::size_t i) const {
    const std::string& t = text(i);
    double v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail(i, "expected a number, got '" + t + "'");
    return v;
  }

  long integer(std::size_t i, long lo = std::numeric_limits<long>::min()) const {
    const std::string& t = text(i);
    long v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail(i, "expected an integer, got '" + t + "'");
    if (v < lo) fail(i, "value must be at least " + std::to_string(lo));
    return v;
  }

  std::uint64_t unsigned_integer(std::size_t i) const {
    const std::string& t = text(i);
    std::uint64_t v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail(i, "expected an unsigned integer, got '" + t + "'");
    return v;
  }

  std::optional<std::pair<int, int>> range(std::size_t i) const {
    const std::string& t = text(i);
    const auto dots = t.find("..");
    if (dots == std::string::npos) return std::nullopt;
    int a = 0, b = 0;
    auto r1 = std::from_chars(t.data(), t.data() + dots, a);
    auto r2 = std::from_chars(t.data() + dots + 2, t.data() + t.size(), b);
    if (r1.ec != std::errc() || r1.ptr != t.data() + dots || r2.ec != std::errc() || r2.ptr != t.data() + t.size() ||
        a < 1 || b < a)
      fail(i, "bad range '" + t + "'");
    return std::make_pair(a, b);
  }

  // "(<elem>)(<elem>)..."
  FiniteSubset subset(std::size_t i, const GroupSpec& spec) const {
    std::vector<GroupElement> elems;
    for (const auto& [body, offset] : groups(i)) elems.push_back(element(i, offset, spec, body));
    FiniteSubset s(elems);
    if (s.size() != elems.size()) fail(i, "repeated element in set");
    return s;
  }

  // "(<elem>:<symbol>)..."
  Pattern pattern(std::size_t i, const GroupSpec& spec, const std::vector<std::string>& alphabet) const {
    std::vector<std::pair<GroupElement, Symbol>> cells;
    for (const auto& [body, offset] : groups(i)) {
      const auto colon = body.rfind(':');
      if (colon == std::string::npos) throw ParseError(line_, tokens_[i].column + offset, "cell needs '<offset>:<symbol>'");
      const std::string sym = body.substr(colon + 1);
      auto it = std::find(alphabet.begin(), alphabet.end(), sym);
      if (it == alphabet.end())
        throw ParseError(line_, tokens_[i].column + offset + static_cast<int>(colon) + 1, "unknown symbol '" + sym + "'");
      cells.emplace_back(element(i, offset, spec, body.substr(0, colon)), static_cast<Symbol>(it - alphabet.begin()));
    }
    try {
      return Pattern::from_cells(std::move(cells));
    } catch (const Error& e) {
      fail(i, e.what());
    }
  }

  Symbol symbol(std::size_t i, const std::vector<std::string>& alphabet) const {
    auto it = std::find(alphabet.begin(), alphabet.end(), text(i));
    if (it == alphabet.end()) fail(i, "unknown symbol '" + text(i) + "'");
    return static_cast<Symbol>(it - alphabet.begin());
  }

 private:
  // Bodies of the parenthesized groups of token i with their offsets.
  std::vector<std::pair<std::string, int>> groups(std::size_t i) const {
    const std::string& t = text(i);
    std::vector<std::pair<std::string, int>> out;
    std::size_t p = 0;
    while (p < t.size()) {
      if (t[p] != '(') throw ParseError(line_, tokens_[i].column + static_cast<int>(p), "expected '('");
      const auto close = t.find(')', p);
      if (close == std::string::npos) throw ParseError(line_, tokens_[i].column + static_cast<int>(p), "unclosed '('");
      out.emplace_back(t.substr(p + 1, close - p - 1), static_cast<int>(p) + 1);
      p = close + 1;
    }
    if (out.empty()) fail(i, "expected at least one '(...)' group");
    return out;
  }

  GroupElement element(std::size_t i, int offset, const GroupSpec& spec, const std::string& body) const {
    try {
      return parse_element(spec, body);
    } catch (const Error& e) {
      throw ParseError(line_, tokens_[i].column + offset, e.what());
    }
  }

  int line_;
  std::vector<Token> tokens_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const LineParser p(lineno, tokens);
    const std::string& d = tokens[0].text;
    auto need_group = [&]() -> const GroupSpec& {
      if (!c.group) p.fail(0, "'" + d + "' needs a preceding 'group' line");
      return *c.group;
    };
    auto need_alphabet = [&]() -> const std::vector<std::string>& {
      need_group();
      if (c.alphabet.empty()) p.fail(0, "'" + d + "' needs a preceding 'alphabet' line");
      return c.alphabet;
    };

    if (d == "group") {
      p.arity(3);
      if (c.group) p.fail(0, "duplicate 'group' line");
      const long r = p.integer(2, 1);
      if (p.text(1) == "Z") c.group = GroupSpec::lattice(static_cast<int>(r));
      else if (p.text(1) == "F") {
        if (r > 26) p.fail(2, "free groups are limited to rank 26");
        c.group = GroupSpec::free_group(static_cast<int>(r));
      } else p.fail(1, "group kind must be Z or F");
    } else if (d == "alphabet") {
      p.at_least(2);
      if (!c.alphabet.empty()) p.fail(0, "duplicate 'alphabet' line");
      std::set<std::string> seen;
      for (std::size_t i = 1; i < p.size(); ++i) {
        const std::string& s = p.text(i);
        if (s.find_first_of("():") != std::string::npos) p.fail(i, "symbol names cannot contain '(', ')' or ':'");
        if (!seen.insert(s).second) p.fail(i, "duplicate symbol '" + s + "'");
        c.alphabet.push_back(s);
      }
    } else if (d == "forbid") {
      p.arity(2);
      if (c.oracle) p.fail(0, "'forbid' and 'oracle' are mutually exclusive");
      const auto& alpha = need_alphabet();
      c.forbidden.push_back(p.pattern(1, *c.group, alpha));
    } else if (d == "oracle") {
      p.arity(2);
      need_group();
      if (!c.forbidden.empty()) p.fail(0, "'forbid' and 'oracle' are mutually exclusive");
      if (c.oracle) p.fail(0, "duplicate 'oracle' line");
      if (p.text(1) == "full") c.oracle = OracleKind::Full;
      else if (p.text(1) == "sunny_side_up") c.oracle = OracleKind::SunnySideUp;
      else p.fail(1, "unknown oracle '" + p.text(1) + "'");
    } else if (d == "potential") {
      if (c.potential) p.fail(0, "duplicate 'potential' line");
      need_alphabet();
      if (p.size() != 3 && p.size() != 5) p.fail(std::min<std::size_t>(p.size(), 5), "expected 'potential window <set> [default <v>]'");
      if (p.text(1) != "window") p.fail(1, "expected 'window'");
      PotentialLine pl;
      pl.window = p.subset(2, *c.group);
      if (p.size() == 5) {
        if (p.text(3) != "default") p.fail(3, "expected 'default'");
        pl.default_value = p.number(4);
      }
      c.potential = std::move(pl);
    } else if (d == "val") {
      if (!c.potential) p.fail(0, "'val' needs a preceding 'potential' line");
      p.arity(c.potential->window.size() + 2);
      std::vector<Symbol> syms;
      for (std::size_t i = 1; i + 1 < p.size(); ++i) syms.push_back(p.symbol(i, c.alphabet));
      if (!c.potential->values.emplace(syms, p.number(p.size() - 1)).second) p.fail(1, "duplicate 'val' entry");
    } else if (d == "interaction") {
      p.arity(3);
      const auto& alpha = need_alphabet();
      c.interactions.emplace_back(p.pattern(1, *c.group, alpha), p.number(2));
    } else if (d == "measure") {
      p.at_least(2);
      if (c.measure) p.fail(0, "duplicate 'measure' line");
      const auto& alpha = need_alphabet();
      MeasureLine m;
      const std::string& kind = p.text(1);
      if (kind == "bernoulli") {
        m.kind = MeasureLine::Kind::Bernoulli;
        p.arity(alpha.size() + 2);
        for (std::size_t i = 2; i < p.size(); ++i) m.numbers.push_back(p.number(i));
      } else if (kind == "markov") {
        m.kind = MeasureLine::Kind::Markov;
        p.at_least(3);
        m.markov_states = static_cast<int>(p.integer(2, 1));
        if (m.markov_states != static_cast<int>(alpha.size())) p.fail(2, "Markov state count must equal the alphabet size");
        p.arity(3 + static_cast<std::size_t>(m.markov_states * m.markov_states));
        for (std::size_t i = 3; i < p.size(); ++i) m.numbers.push_back(p.number(i));
      } else if (kind == "haar") {
        m.kind = MeasureLine::Kind::Haar;
        p.arity(2);
      } else if (kind == "empirical") {
        m.kind = MeasureLine::Kind::Empirical;
        p.arity(4);
        m.file = p.text(2);
        m.window = p.subset(3, *c.group);
      } else {
        p.fail(1, "unknown measure kind '" + kind + "'");
      }
      c.measure = std::move(m);
    } else if (d == "model") {
      p.at_least(3);
      const GroupSpec& g = need_group();
      ModelLine m;
      if (p.text(1) == "torus") {
        if (!g.is_lattice()) p.fail(1, "torus models need group Z d");
        m.torus = true;
        if (auto r = p.range(2)) {
          if (g.rank() != 1) p.fail(2, "size ranges are for Z only");
          p.arity(3);
          m.range = r;
        } else {
          p.arity(2 + static_cast<std::size_t>(g.rank()));
          for (std::size_t i = 2; i < p.size(); ++i) m.sides.push_back(static_cast<int>(p.integer(i, 1)));
        }
      } else if (p.text(1) == "random") {
        if (!g.is_free()) p.fail(1, "random permutation models need group F k");
        m.torus = false;
        p.arity(5);
        if (auto r = p.range(2)) m.range = r;
        else m.sides.push_back(static_cast<int>(p.integer(2, 1)));
        if (p.text(3) != "seed") p.fail(3, "expected 'seed'");
        m.seed = p.unsigned_integer(4);
      } else {
        p.fail(1, "model kind must be torus or random");
      }
      c.models.push_back(std::move(m));
    } else if (d == "delta") {
      p.at_least(2);
      for (std::size_t i = 1; i < p.size(); ++i) {
        const double v = p.number(i);
        if (!(v >= 0 && v <= 1)) p.fail(i, "delta must lie in [0, 1]");
        c.deltas.push_back(v);
      }
    } else if (d == "window") {
      p.at_least(2);
      if (c.window || c.window_radius) p.fail(0, "duplicate 'window' line");
      if (p.text(1) == "radius") {
        p.arity(3);
        need_group();
        c.window_radius = static_cast<int>(p.integer(2, 0));
      } else {
        p.arity(2);
        c.window = p.subset(1, need_group());
      }
    } else if (d == "samples") {
      p.arity(2);
      c.samples = static_cast<std::size_t>(p.integer(1, 1));
    } else if (d == "mode") {
      p.arity(2);
      if (p.text(1) != "exact" && p.text(1) != "sis") p.fail(1, "mode must be exact or sis");
      c.mode = p.text(1);
    } else if (d == "pattern") {
      p.arity(3);
      const auto& alpha = need_alphabet();
      if (p.text(1) == "p") c.pattern_p = p.pattern(2, *c.group, alpha);
      else if (p.text(1) == "q") c.pattern_q = p.pattern(2, *c.group, alpha);
      else p.fail(1, "pattern name must be p or q");
    } else if (d == "memory") {
      p.arity(4);
      c.memory_set = p.subset(1, need_group());
      if (p.text(2) != "max_radius") p.fail(2, "expected 'max_radius'");
      c.memory_max_radius = static_cast<int>(p.integer(3, 0));
    } else if (d == "radius") {
      p.arity(2);
      c.radius = static_cast<int>(p.integer(1, 0));
    } else if (d == "family") {
      p.arity(2);
      if (p.text(1) != "golden_mean" && p.text(1) != "bernoulli") p.fail(1, "family must be golden_mean or bernoulli");
      c.family = p.text(1);
    } else if (d == "phat") {
      p.at_least(2);
      for (std::size_t i = 1; i < p.size(); ++i) c.phat_c.push_back(p.number(i));
    } else {
      p.fail(0, "unknown directive '" + d + "'");
    }
  }
  if (c.pattern_p && c.pattern_q && c.pattern_p->support() != c.pattern_q->support())
    throw ParseError(lineno, 1, "patterns p and q need the same support");
  return c;
}

namespace {

std::string format_subset(const FiniteSubset& s) {
  std::string out;
  for (const auto& g : s) out += "(" + format_element(g) + ")";
  return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  if (c.group) os << c.group->to_line() << '\n';
  if (!c.alphabet.empty()) {
    os << "alphabet";
    for (const auto& s : c.alphabet) os << ' ' << s;
    os << '\n';
  }
  if (c.oracle) os << "oracle " << (*c.oracle == OracleKind::Full ? "full" : "sunny_side_up") << '\n';
  for (const auto& f : c.forbidden) os << "forbid " << format_pattern(f, c.alphabet) << '\n';
  if (c.potential) {
    os << "potential window " << format_subset(c.potential->window);
    if (c.potential->default_value != 0) os << " default " << format_double(c.potential->default_value);
    os << '\n';
    for (const auto& [syms, v] : c.potential->values) {
      os << "val";
      for (Symbol s : syms) os << ' ' << c.alphabet[s];
      os << ' ' << format_double(v) << '\n';
    }
  }
  for (const auto& [pat, v] : c.interactions) os << "interaction " << format_pattern(pat, c.alphabet) << ' ' << format_double(v) << '\n';
  if (c.measure) {
    const auto& m = *c.measure;
    os << "measure ";
    switch (m.kind) {
      case MeasureLine::Kind::Bernoulli:
        os << "bernoulli";
        for (double v : m.numbers) os << ' ' << format_double(v);
        break;
      case MeasureLine::Kind::Markov:
        os << "markov " << m.markov_states;
        for (double v : m.numbers) os << ' ' << format_double(v);
        break;
      case MeasureLine::Kind::Haar:
        os << "haar";
        break;
      case MeasureLine::Kind::Empirical:
        os << "empirical " << m.file << ' ' << format_subset(m.window);
        break;
    }
    os << '\n';
  }
  for (const auto& m : c.models) {
    os << "model " << (m.torus ? "torus" : "random");
    if (m.range) os << ' ' << m.range->first << ".." << m.range->second;
    for (int s : m.sides) os << ' ' << s;
    if (!m.torus) os << " seed " << m.seed;
    os << '\n';
  }
  if (!c.deltas.empty()) {
    os << "delta";
    for (double v : c.deltas) os << ' ' << format_double(v);
    os << '\n';
  }
  if (c.window) os << "window " << format_subset(*c.window) << '\n';
  if (c.window_radius) os << "window radius " << *c.window_radius << '\n';
  if (c.samples) os << "samples " << *c.samples << '\n';
  if (c.mode) os << "mode " << *c.mode << '\n';
  if (c.pattern_p) os << "pattern p " << format_pattern(*c.pattern_p, c.alphabet) << '\n';
  if (c.pattern_q) os << "pattern q " << format_pattern(*c.pattern_q, c.alphabet) << '\n';
  if (c.memory_set) os << "memory " << format_subset(*c.memory_set) << " max_radius " << c.memory_max_radius.value_or(0) << '\n';
  if (c.radius) os << "radius " << *c.radius << '\n';
  if (c.family) os << "family " << *c.family << '\n';
  if (!c.phat_c.empty()) {
    os << "phat";
    for (double v : c.phat_c) os << ' ' << format_double(v);
    os << '\n';
  }
  return os.str();
}

Subshift build_subshift(const ExperimentConfig& c) {
  if (!c.group) throw PreconditionError("config has no 'group' line");
  if (c.oracle) {
    std::vector<std::string> alpha = c.alphabet;
    if (alpha.empty()) alpha = {"0", "1"};
    if (*c.oracle == OracleKind::SunnySideUp && alpha.size() != 2)
      throw PreconditionError("sunny-side-up needs a two-symbol alphabet");
    return Subshift::oracle(*c.group, std::move(alpha), *c.oracle);
  }
  if (c.alphabet.empty()) throw PreconditionError("config has no 'alphabet' line");
  return Subshift::forbidden(*c.group, c.alphabet, c.forbidden);
}

LocallyConstantPotential build_potential(const ExperimentConfig& c) {
  const Subshift x = build_subshift(c);
  const int k = x.alphabet_size();
  LocallyConstantPotential f = LocallyConstantPotential::zero(x.spec(), k);
  if (c.potential) {
    const auto& pl = *c.potential;
    f = LocallyConstantPotential::from_function(pl.window, k, [&](const std::vector<Symbol>& v) {
      auto it = pl.values.find(v);
      return it == pl.values.end() ? pl.default_value : it->second;
    });
  }
  if (!c.interactions.empty()) {
    Interaction phi(x.spec(), k);
    for (const auto& [pat, v] : c.interactions) phi.add(pat, v);
    f = combine(f, f_from_interaction(phi), 1.0, 1.0);
  }
  return f;
}

std::optional<MeasureSpec> build_measure(const ExperimentConfig& c, const std::string& base_dir) {
  if (!c.measure) return std::nullopt;
  const auto& m = *c.measure;
  switch (m.kind) {
    case MeasureLine::Kind::Bernoulli:
      return make_bernoulli(m.numbers);
    case MeasureLine::Kind::Markov: {
      const int k = m.markov_states;
      Eigen::MatrixXd p(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) p(i, j) = m.numbers[static_cast<std::size_t>(i * k + j)];
      return make_markov(p);
    }
    case MeasureLine::Kind::Haar:
      return make_haar(build_subshift(c));
    case MeasureLine::Kind::Empirical: {
      const std::string path = m.file.starts_with('/') ? m.file : base_dir + "/" + m.file;
      std::ifstream in(path);
      if (!in) throw PreconditionError("cannot open microstate file '" + path + "'");
      std::string line;
      std::getline(in, line);
      const auto models = build_models(c);
      if (models.empty()) throw PreconditionError("empirical measure needs a model line");
      const Microstate w = read_microstate(line, build_subshift(c).alphabet());
      return EmpiricalMeasure{empirical(models.front(), w, m.window)};
    }
  }
  return std::nullopt;
}

std::vector<SoficMap> build_models(const ExperimentConfig& c) {
  std::vector<SoficMap> out;
  if (!c.group) return out;
  for (const auto& m : c.models) {
    std::vector<int> sizes = m.sides;
    if (m.range) {
      sizes.clear();
      for (int n = m.range->first; n <= m.range->second; ++n) sizes.push_back(n);
    }
    if (m.torus) {
      if (m.range)
        for (int n : sizes) out.push_back(build_torus({n}));
      else
        out.push_back(build_torus(m.sides));
    } else {
      for (int n : sizes) out.push_back(build_random_perm(c.group->rank(), static_cast<std::size_t>(n), m.seed));
    }
  }
  return out;
}

FiniteSubset build_window(const ExperimentConfig& c) {
  if (c.window) return *c.window;
  if (!c.group) throw PreconditionError("config has no 'group' line");
  return ball(*c.group, c.window_radius.value_or(1));
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace soficlab
