#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmatch/errors.hpp"
#include "tmatch/rng.hpp"

namespace tmatch {

// Joint pmf over attribute pairs [0, ell) x [0, ell), with cached marginals.
// Construct through validate_distribution so every instance is normalized.
class EdgeDistribution {
 public:
  int ell() const { return ell_; }
  double joint(int x, int y) const { return joint_[static_cast<std::size_t>(x) * ell_ + y]; }
  double px(int x) const { return px_[x]; }
  double py(int y) const { return py_[y]; }
  bool in_support(int x, int y) const { return joint(x, y) > 0.0; }
  const std::vector<double>& flat() const { return joint_; }

  // Smallest positive joint cell; used for the epsilon clamp.
  double min_nonzero_joint() const;

  // True when joint == px (x) py for every cell (within tol).
  bool is_product(double tol = 1e-12) const;

  friend EdgeDistribution validate_distribution(const std::vector<std::vector<double>>& raw);

 private:
  int ell_ = 0;
  std::vector<double> joint_;  // row-major ell x ell
  std::vector<double> px_, py_;
};

// Checks shape/positivity/normalization (sum within 1e-6 of 1), then
// renormalizes exactly. Throws DomainError: NonSquare, NegativeEntry,
// NotNormalized.
EdgeDistribution validate_distribution(const std::vector<std::vector<double>>& raw);

// Text format: first line ell, then ell rows of ell decimals.
EdgeDistribution read_distribution(std::istream& in);
EdgeDistribution read_distribution_file(const std::string& path);
void write_distribution(std::ostream& out, const EdgeDistribution& dist);

// Bijection [0,n) -> [0,n); map[v] is the label of vertex v.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::vector<int> map);
  static Labeling identity(int n);
  static Labeling uniform_random(int n, RngStream& rng);

  int n() const { return static_cast<int>(map_.size()); }
  int operator()(int v) const { return map_[v]; }
  const std::vector<int>& map() const { return map_; }
  Labeling inverse() const;
  Labeling compose(const Labeling& inner) const;  // (*this)(inner(v))
  bool operator==(const Labeling& other) const { return map_ == other.map_; }

 private:
  std::vector<int> map_;
};

// Symmetric n x n attribute matrix with zero diagonal, entries in [0, ell).
class AttrMatrix {
 public:
  AttrMatrix() = default;
  AttrMatrix(int n, int fill = 0) : n_(n), data_(static_cast<std::size_t>(n) * n, static_cast<std::uint8_t>(fill)) {}

  int n() const { return n_; }
  std::uint8_t at(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  void set(int i, int j, std::uint8_t v) {
    data_[static_cast<std::size_t>(i) * n_ + j] = v;
    data_[static_cast<std::size_t>(j) * n_ + i] = v;
  }
  bool is_symmetric_zero_diag() const;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> data_;
};

using UTVector = std::vector<std::uint8_t>;

inline std::uint64_t ut_length(int n) {
  return static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

// Index of unordered pair {i, j}, 0-based vertices, in the row-major upper
// triangle enumeration (0,1),(0,2),...,(0,n-1),(1,2),...
std::uint64_t ut_index(int i, int j, int n);

// Flattens the strict upper triangle. Throws AsymmetricInput if the matrix
// is not symmetric with zero diagonal.
UTVector ut_of(const AttrMatrix& adj);

// Pair permutation pi with pi[ut_index(i,j)] = ut_index(sigma(i), sigma(j)),
// so that ut_of(relabel(A, sigma))[pi[k]] == ut_of(A)[k].
std::vector<std::uint64_t> induced_ut_permutation(const Labeling& sigma);

// A correlated pair: adj1 is indexed by labels directly (first graph's
// labeling is the identity), adj2 is indexed by vertices and carries the
// hidden truth labeling.
struct GraphPair {
  int n = 0;
  AttrMatrix adj1;
  AttrMatrix adj2;
  Labeling truth;
  EdgeDistribution dist;
};

// Fraction of vertices v with hat(v) == truth(v).
double accuracy(const Labeling& hat, const Labeling& truth);

}  // namespace tmatch
