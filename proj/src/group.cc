#include "soficlab/group.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <set>

#include "soficlab/error.h"

namespace soficlab {

GroupSpec::GroupSpec(GroupKind kind, int rank) : kind_(kind), rank_(rank) {
  if (rank < 1) throw PreconditionError("group rank must be >= 1");
  if (kind == GroupKind::FreeGroup && rank > 26)
    throw PreconditionError("free group rank must be <= 26");
  for (int i = 0; i < rank; ++i) {
    if (kind == GroupKind::IntegerLattice)
      labels_.push_back("e" + std::to_string(i + 1));
    else
      labels_.push_back(std::string(1, static_cast<char>('a' + i)));
  }
}

GroupSpec GroupSpec::lattice(int d) { return GroupSpec(GroupKind::IntegerLattice, d); }
GroupSpec GroupSpec::free_group(int k) { return GroupSpec(GroupKind::FreeGroup, k); }

std::string GroupSpec::to_line() const {
  return std::string("group ") + (is_lattice() ? "Z " : "F ") + std::to_string(rank_);
}

GroupElement GroupElement::identity(const GroupSpec& spec) {
  GroupElement e;
  e.kind_ = spec.kind();
  e.rank_ = spec.rank();
  if (spec.is_lattice()) e.data_.assign(spec.rank(), 0);
  return e;
}

GroupElement GroupElement::lattice(std::vector<int> coords) {
  if (coords.empty()) throw PreconditionError("lattice element needs at least one coordinate");
  GroupElement e;
  e.kind_ = GroupKind::IntegerLattice;
  e.rank_ = static_cast<int>(coords.size());
  e.data_ = std::move(coords);
  return e;
}

GroupElement GroupElement::word(int k, std::vector<int> letters) {
  GroupElement e;
  e.kind_ = GroupKind::FreeGroup;
  e.rank_ = k;
  for (int l : letters) {
    if (l == 0 || std::abs(l) > k) throw PreconditionError("invalid free-group letter");
    if (!e.data_.empty() && e.data_.back() == -l)
      e.data_.pop_back();
    else
      e.data_.push_back(l);
  }
  return e;
}

GroupElement GroupElement::generator(const GroupSpec& spec, int i) {
  if (i < 0 || i >= spec.rank()) throw PreconditionError("generator index out of range");
  if (spec.is_lattice()) {
    std::vector<int> c(spec.rank(), 0);
    c[i] = 1;
    return lattice(std::move(c));
  }
  return word(spec.rank(), {i + 1});
}

bool GroupElement::is_identity() const {
  return std::all_of(data_.begin(), data_.end(), [](int c) { return c == 0; });
}

int GroupElement::length() const {
  if (kind_ == GroupKind::FreeGroup) return static_cast<int>(data_.size());
  int s = 0;
  for (int c : data_) s += std::abs(c);
  return s;
}

std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
  return a.data_ <=> b.data_;
}

namespace {

void require_same(const GroupElement& g, const GroupElement& h) {
  if (g.kind() != h.kind() || g.rank() != h.rank())
    throw SpecMismatch("group elements belong to different groups");
}

}  // namespace

GroupElement mul(const GroupElement& g, const GroupElement& h) {
  require_same(g, h);
  if (g.kind() == GroupKind::IntegerLattice) {
    std::vector<int> c(g.data());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += h.data()[i];
    return GroupElement::lattice(std::move(c));
  }
  std::vector<int> w(g.data());
  w.insert(w.end(), h.data().begin(), h.data().end());
  return GroupElement::word(g.rank(), std::move(w));
}

GroupElement inverse(const GroupElement& g) {
  if (g.kind() == GroupKind::IntegerLattice) {
    std::vector<int> c(g.data());
    for (int& x : c) x = -x;
    return GroupElement::lattice(std::move(c));
  }
  std::vector<int> w(g.data().rbegin(), g.data().rend());
  for (int& l : w) l = -l;
  return GroupElement::word(g.rank(), std::move(w));
}

std::string format_element(const GroupElement& g) {
  std::string out;
  if (g.kind() == GroupKind::IntegerLattice) {
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      if (i) out += ',';
      out += std::to_string(g.data()[i]);
    }
    return out;
  }
  if (g.data().empty()) return "1";
  for (int l : g.data()) {
    char c = static_cast<char>('a' + std::abs(l) - 1);
    out += l > 0 ? c : static_cast<char>(std::toupper(c));
  }
  return out;
}

GroupElement parse_element(const GroupSpec& spec, std::string_view text) {
  if (text.empty()) throw PreconditionError("empty group element");
  if (spec.is_lattice()) {
    std::vector<int> coords;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = text.find(',', start);
      std::string part(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
      char* end = nullptr;
      long v = std::strtol(part.c_str(), &end, 10);
      if (part.empty() || *end != '\0') throw PreconditionError("bad lattice coordinate '" + part + "'");
      coords.push_back(static_cast<int>(v));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(coords.size()) != spec.rank())
      throw SpecMismatch("lattice element '" + std::string(text) + "' has wrong dimension");
    return GroupElement::lattice(std::move(coords));
  }
  if (text == "1") return GroupElement::identity(spec);
  std::vector<int> letters;
  for (char c : text) {
    if (!std::isalpha(static_cast<unsigned char>(c)))
      throw PreconditionError("bad free-group letter '" + std::string(1, c) + "'");
    int idx = std::tolower(static_cast<unsigned char>(c)) - 'a' + 1;
    if (idx > spec.rank()) throw SpecMismatch("letter '" + std::string(1, c) + "' outside the free group rank");
    letters.push_back(std::islower(static_cast<unsigned char>(c)) ? idx : -idx);
  }
  return GroupElement::word(spec.rank(), std::move(letters));
}

FiniteSubset::FiniteSubset(std::vector<GroupElement> elements) : elems_(std::move(elements)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  for (const auto& e : elems_)
    if (e.kind() != elems_.front().kind() || e.rank() != elems_.front().rank())
      throw SpecMismatch("finite subset mixes elements of different groups");
}

bool FiniteSubset::contains(const GroupElement& g) const {
  return std::binary_search(elems_.begin(), elems_.end(), g);
}

long FiniteSubset::index_of(const GroupElement& g) const {
  auto it = std::lower_bound(elems_.begin(), elems_.end(), g);
  if (it == elems_.end() || *it != g) return -1;
  return it - elems_.begin();
}

bool FiniteSubset::is_subset_of(const FiniteSubset& other) const {
  return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
}

FiniteSubset ball(const GroupSpec& spec, int r) {
  if (r < 0) throw PreconditionError("ball radius must be >= 0");
  if (spec.is_lattice()) {
    // Lattice balls are boxes [-r, r]^d.
    std::vector<GroupElement> out;
    std::vector<int> c(spec.rank(), -r);
    while (true) {
      out.push_back(GroupElement::lattice(c));
      int i = 0;
      while (i < spec.rank() && c[i] == r) c[i++] = -r;
      if (i == spec.rank()) break;
      ++c[i];
    }
    return FiniteSubset(std::move(out));
  }
  std::vector<GroupElement> gens;
  for (int i = 0; i < spec.rank(); ++i) {
    auto g = GroupElement::generator(spec, i);
    gens.push_back(g);
    gens.push_back(inverse(g));
  }
  std::set<GroupElement> seen{GroupElement::identity(spec)};
  std::vector<GroupElement> frontier{GroupElement::identity(spec)};
  for (int step = 0; step < r; ++step) {
    std::vector<GroupElement> next;
    for (const auto& g : frontier)
      for (const auto& s : gens) {
        auto h = mul(g, s);
        if (seen.insert(h).second) next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return FiniteSubset(std::vector<GroupElement>(seen.begin(), seen.end()));
}

FiniteSubset set_product(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<GroupElement> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(mul(x, y));
  return FiniteSubset(std::move(out));
}

FiniteSubset set_inverse(const FiniteSubset& a) {
  std::vector<GroupElement> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(inverse(x));
  return FiniteSubset(std::move(out));
}

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<GroupElement> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return FiniteSubset(std::move(out));
}

FiniteSubset set_intersection(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<GroupElement> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset(std::move(out));
}

FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<GroupElement> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset(std::move(out));
}

FiniteSubset translate(const GroupElement& g, const FiniteSubset& f) {
  std::vector<GroupElement> out;
  out.reserve(f.size());
  for (const auto& x : f) out.push_back(mul(g, x));
  return FiniteSubset(std::move(out));
}

GroupElement z(int n) { return GroupElement::lattice({n}); }

FiniteSubset z_set(std::initializer_list<int> ns) {
  std::vector<GroupElement> out;
  for (int n : ns) out.push_back(z(n));
  return FiniteSubset(std::move(out));
}

FiniteSubset z_interval(int lo, int hi) {
  std::vector<GroupElement> out;
  for (int n = lo; n <= hi; ++n) out.push_back(z(n));
  return FiniteSubset(std::move(out));
}

}  // namespace soficlab
