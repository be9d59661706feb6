#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace soficlab {

enum class GroupKind { IntegerLattice, FreeGroup };

// A group from the shipped catalogue: Z^d or the free group F_k.
class GroupSpec {
 public:
  static GroupSpec lattice(int d);
  static GroupSpec free_group(int k);

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool is_lattice() const { return kind_ == GroupKind::IntegerLattice; }
  bool is_free() const { return kind_ == GroupKind::FreeGroup; }

  // "group Z <d>" or "group F <k>".
  std::string to_line() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.kind_ == b.kind_ && a.rank_ == b.rank_;
  }

 private:
  GroupSpec(GroupKind kind, int rank);

  GroupKind kind_;
  int rank_;
  std::vector<std::string> labels_;
};

// Element in canonical form. Lattice elements store their coordinate vector;
// free-group elements store a freely reduced word where generator i is
// encoded as i+1 and its inverse as -(i+1).
class GroupElement {
 public:
  GroupElement() = default;

  static GroupElement identity(const GroupSpec& spec);
  static GroupElement lattice(std::vector<int> coords);
  // Reduces the word freely; letters must be nonzero and |letter| <= k.
  static GroupElement word(int k, std::vector<int> letters);
  // i-th standard generator (0-based).
  static GroupElement generator(const GroupSpec& spec, int i);

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }
  const std::vector<int>& data() const { return data_; }
  bool is_identity() const;
  bool belongs_to(const GroupSpec& spec) const {
    return spec.kind() == kind_ && spec.rank() == rank_;
  }
  // Word length w.r.t. the standard symmetric generating set.
  int length() const;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b);

 private:
  GroupKind kind_ = GroupKind::IntegerLattice;
  int rank_ = 1;
  std::vector<int> data_;
};

GroupElement mul(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

// Lattice: "1,-2"; free group: "abA" with uppercase for inverses, "1" for the
// identity.
std::string format_element(const GroupElement& g);
GroupElement parse_element(const GroupSpec& spec, std::string_view text);

// Sorted, duplicate-free set of elements of one group.
class FiniteSubset {
 public:
  FiniteSubset() = default;
  FiniteSubset(std::vector<GroupElement> elements);
  FiniteSubset(std::initializer_list<GroupElement> elements)
      : FiniteSubset(std::vector<GroupElement>(elements)) {}

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const GroupElement& operator[](std::size_t i) const { return elems_[i]; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<GroupElement>& elements() const { return elems_; }

  bool contains(const GroupElement& g) const;
  // Position of g in canonical order, or -1.
  long index_of(const GroupElement& g) const;
  bool is_subset_of(const FiniteSubset& other) const;

  friend bool operator==(const FiniteSubset&, const FiniteSubset&) = default;
  friend auto operator<=>(const FiniteSubset& a, const FiniteSubset& b) {
    return a.elems_ <=> b.elems_;
  }

 private:
  std::vector<GroupElement> elems_;
};

FiniteSubset ball(const GroupSpec& spec, int r);
FiniteSubset set_product(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_inverse(const FiniteSubset& a);
FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_intersection(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b);
// Left translate g·F.
FiniteSubset translate(const GroupElement& g, const FiniteSubset& f);

// Integers as elements of Z (convenience for the many one-dimensional cases).
GroupElement z(int n);
FiniteSubset z_set(std::initializer_list<int> ns);
FiniteSubset z_interval(int lo, int hi);

}  // namespace soficlab
