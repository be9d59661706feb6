#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soficlab/group.h"

namespace soficlab {

using Vertex = std::uint32_t;

enum class Provenance { Torus, RandomPerm, File };

// Finite model sigma: Gamma -> Sym(V) given by one permutation per generator.
// Vertices are 0..n-1. Evaluation on a group element composes generator
// permutations along its canonical form, so sigma is a homomorphism for both
// builders (tori commute; free groups extend freely).
class SoficMap {
 public:
  SoficMap(GroupSpec spec, std::vector<std::vector<Vertex>> generator_images,
           Provenance provenance = Provenance::File, std::uint64_t seed = 0);

  const GroupSpec& spec() const { return spec_; }
  std::size_t size() const { return n_; }
  Provenance provenance() const { return provenance_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Vertex>& generator_images(int i) const { return images_[i]; }
  const std::vector<int>& torus_sides() const { return sides_; }

  // sigma(g) v
  Vertex act(const GroupElement& g, Vertex v) const;
  // Full permutation sigma(g) as an image array.
  std::vector<Vertex> permutation(const GroupElement& g) const;

  friend SoficMap build_torus(const std::vector<int>& sides);

 private:
  GroupSpec spec_;
  std::size_t n_;
  std::vector<std::vector<Vertex>> images_;
  std::vector<std::vector<Vertex>> inverse_images_;
  Provenance provenance_;
  std::uint64_t seed_;
  std::vector<int> sides_;
};

// Z^d acting on the product of cyclic groups by translation. Vertex
// (c_1,...,c_d) has index c_1 + s_1*(c_2 + s_2*(...)).
SoficMap build_torus(const std::vector<int>& sides);
// Independent uniformly random permutations for the generators of F_k.
SoficMap build_random_perm(int k, std::size_t n, std::uint64_t seed);

bool is_F_good(const SoficMap& sigma, const FiniteSubset& f, Vertex v);
// Exact fraction |{v good}| / n as a numerator/denominator pair.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num * b.den == b.num * a.den;
  }
};
Fraction goodness_fraction(const SoficMap& sigma, const FiniteSubset& f);

// Model file: header "sofic <group-line> n=<n> seed=<s>", then one line per
// generator with its space-separated image array.
std::string write_model(const SoficMap& sigma);
SoficMap read_model(const std::string& text);

}  // namespace soficlab
