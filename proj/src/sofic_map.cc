#include "soficlab/sofic_map.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "soficlab/error.h"
#include "soficlab/random.h"

namespace soficlab {

namespace {

std::vector<Vertex> invert(const std::vector<Vertex>& perm) {
  std::vector<Vertex> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<Vertex>(i);
  return inv;
}

void require_permutation(const std::vector<Vertex>& perm, std::size_t n) {
  if (perm.size() != n) throw PreconditionError("generator image array has wrong length");
  std::vector<char> hit(n, 0);
  for (Vertex v : perm) {
    if (v >= n || hit[v]) throw PreconditionError("generator image array is not a permutation");
    hit[v] = 1;
  }
}

}  // namespace

SoficMap::SoficMap(GroupSpec spec, std::vector<std::vector<Vertex>> generator_images,
                   Provenance provenance, std::uint64_t seed)
    : spec_(std::move(spec)),
      n_(generator_images.empty() ? 0 : generator_images.front().size()),
      images_(std::move(generator_images)),
      provenance_(provenance),
      seed_(seed) {
  if (static_cast<int>(images_.size()) != spec_.rank())
    throw PreconditionError("need one permutation per generator");
  if (n_ == 0) throw PreconditionError("sofic model needs at least one vertex");
  for (const auto& p : images_) {
    require_permutation(p, n_);
    inverse_images_.push_back(invert(p));
  }
}

Vertex SoficMap::act(const GroupElement& g, Vertex v) const {
  if (!g.belongs_to(spec_)) throw SpecMismatch("element does not belong to the model's group");
  const auto& d = g.data();
  if (spec_.is_lattice()) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      int c = d[j];
      const auto& step = c >= 0 ? images_[j] : inverse_images_[j];
      if (!sides_.empty()) {
        // Translation on a torus: reduce the exponent modulo the side.
        c = ((c % sides_[j]) + sides_[j]) % sides_[j];
        for (int t = 0; t < c; ++t) v = images_[j][v];
        continue;
      }
      for (int t = 0; t < std::abs(c); ++t) v = step[v];
    }
    return v;
  }
  // Rightmost letter acts first.
  for (auto it = d.rbegin(); it != d.rend(); ++it) {
    int l = *it;
    v = l > 0 ? images_[l - 1][v] : inverse_images_[-l - 1][v];
  }
  return v;
}

std::vector<Vertex> SoficMap::permutation(const GroupElement& g) const {
  std::vector<Vertex> out(n_);
  for (Vertex v = 0; v < n_; ++v) out[v] = act(g, v);
  return out;
}

SoficMap build_torus(const std::vector<int>& sides) {
  if (sides.empty()) throw PreconditionError("torus needs at least one side");
  for (int s : sides)
    if (s < 1) throw PreconditionError("torus sides must be >= 1");
  std::size_t n = 1;
  for (int s : sides) n *= static_cast<std::size_t>(s);
  const int d = static_cast<int>(sides.size());
  std::vector<std::vector<Vertex>> images(d, std::vector<Vertex>(n));
  std::size_t stride = 1;
  for (int j = 0; j < d; ++j) {
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t c = (v / stride) % sides[j];
      std::size_t next = (c + 1) % sides[j];
      images[j][v] = static_cast<Vertex>(v + (next - c) * stride);
    }
    stride *= sides[j];
  }
  SoficMap m(GroupSpec::lattice(d), std::move(images), Provenance::Torus, 0);
  m.sides_ = sides;
  return m;
}

SoficMap build_random_perm(int k, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("model size must be >= 1");
  std::vector<std::vector<Vertex>> images;
  for (int i = 0; i < k; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<Vertex> p(n);
    std::iota(p.begin(), p.end(), Vertex{0});
    for (std::size_t j = n; j > 1; --j) std::swap(p[j - 1], p[rng.below(j)]);
    images.push_back(std::move(p));
  }
  return SoficMap(GroupSpec::free_group(k), std::move(images), Provenance::RandomPerm, seed);
}

namespace {

struct GoodnessTables {
  std::vector<std::vector<Vertex>> single;                // sigma(s) for s in F
  std::vector<std::vector<std::vector<Vertex>>> product;  // sigma(st)
};

GoodnessTables goodness_tables(const SoficMap& sigma, const FiniteSubset& f) {
  GoodnessTables t;
  for (const auto& s : f) t.single.push_back(sigma.permutation(s));
  for (const auto& s : f) {
    std::vector<std::vector<Vertex>> row;
    for (const auto& u : f) row.push_back(sigma.permutation(mul(s, u)));
    t.product.push_back(std::move(row));
  }
  return t;
}

bool good_at(const GoodnessTables& t, Vertex v) {
  const std::size_t m = t.single.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (t.product[i][j][v] != t.single[i][t.single[j][v]]) return false;
  std::vector<Vertex> images;
  images.reserve(m);
  for (std::size_t i = 0; i < m; ++i) images.push_back(t.single[i][v]);
  std::sort(images.begin(), images.end());
  return std::adjacent_find(images.begin(), images.end()) == images.end();
}

}  // namespace

bool is_F_good(const SoficMap& sigma, const FiniteSubset& f, Vertex v) {
  if (f.empty()) throw PreconditionError("F must be nonempty");
  if (v >= sigma.size()) throw PreconditionError("vertex out of range");
  // Only the columns for v are needed; evaluate directly.
  std::vector<Vertex> images;
  for (const auto& s : f) {
    for (const auto& u : f)
      if (sigma.act(mul(s, u), v) != sigma.act(s, sigma.act(u, v))) return false;
    images.push_back(sigma.act(s, v));
  }
  std::sort(images.begin(), images.end());
  return std::adjacent_find(images.begin(), images.end()) == images.end();
}

Fraction goodness_fraction(const SoficMap& sigma, const FiniteSubset& f) {
  if (f.empty()) throw PreconditionError("F must be nonempty");
  auto tables = goodness_tables(sigma, f);
  Fraction out{0, sigma.size()};
  for (Vertex v = 0; v < sigma.size(); ++v)
    if (good_at(tables, v)) ++out.num;
  return out;
}

std::string write_model(const SoficMap& sigma) {
  std::ostringstream os;
  os << "sofic " << sigma.spec().to_line() << " n=" << sigma.size() << " seed=" << sigma.seed() << '\n';
  for (int i = 0; i < sigma.spec().rank(); ++i) {
    const auto& img = sigma.generator_images(i);
    for (std::size_t j = 0; j < img.size(); ++j) os << (j ? " " : "") << img[j];
    os << '\n';
  }
  return os.str();
}

SoficMap read_model(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header)) throw ParseError(1, 1, "empty model file");
  std::istringstream hs(header);
  std::string sofic, group, kind, nfield, seedfield;
  int rank = 0;
  if (!(hs >> sofic >> group >> kind >> rank >> nfield >> seedfield) || sofic != "sofic" || group != "group" ||
      nfield.rfind("n=", 0) != 0 || seedfield.rfind("seed=", 0) != 0)
    throw ParseError(1, 1, "bad model header");
  GroupSpec spec = kind == "Z"   ? GroupSpec::lattice(rank)
                   : kind == "F" ? GroupSpec::free_group(rank)
                                 : throw ParseError(1, 13, "unknown group kind '" + kind + "'");
  const std::size_t n = std::stoull(nfield.substr(2));
  const std::uint64_t seed = std::stoull(seedfield.substr(5));
  std::vector<std::vector<Vertex>> images;
  std::string line;
  int lineno = 1;
  while (static_cast<int>(images.size()) < rank && std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<Vertex> img;
    unsigned long v;
    while (ls >> v) img.push_back(static_cast<Vertex>(v));
    if (img.size() != n) throw ParseError(lineno, 1, "image array length differs from n");
    images.push_back(std::move(img));
  }
  if (static_cast<int>(images.size()) != rank) throw ParseError(lineno, 1, "missing generator lines");
  return SoficMap(spec, std::move(images), Provenance::File, seed);
}

}  // namespace soficlab
