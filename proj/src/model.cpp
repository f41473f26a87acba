#include "tmatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tmatch {

double EdgeDistribution::min_nonzero_joint() const {
  double best = std::numeric_limits<double>::infinity();
  for (double v : joint_) {
    if (v > 0.0) best = std::min(best, v);
  }
  if (!std::isfinite(best)) fail(Errc::internal_error, "distribution has empty support");
  return best;
}

bool EdgeDistribution::is_product(double tol) const {
  for (int x = 0; x < ell_; ++x)
    for (int y = 0; y < ell_; ++y)
      if (std::fabs(joint(x, y) - px_[x] * py_[y]) > tol) return false;
  return true;
}

EdgeDistribution validate_distribution(const std::vector<std::vector<double>>& raw) {
  const std::size_t ell = raw.size();
  if (ell < 2) fail(Errc::non_square, "need at least a 2x2 matrix");
  for (const auto& row : raw) {
    if (row.size() != ell) fail(Errc::non_square, "row length differs from row count");
  }
  double sum = 0.0;
  for (const auto& row : raw) {
    for (double v : row) {
      if (!(v >= 0.0)) fail(Errc::negative_entry, "entries must be nonnegative");
      sum += v;
    }
  }
  if (std::fabs(sum - 1.0) > 1e-6) {
    fail(Errc::not_normalized, "entries sum to " + std::to_string(sum));
  }
  EdgeDistribution d;
  d.ell_ = static_cast<int>(ell);
  d.joint_.resize(ell * ell);
  for (std::size_t x = 0; x < ell; ++x)
    for (std::size_t y = 0; y < ell; ++y) d.joint_[x * ell + y] = raw[x][y] / sum;
  d.px_.assign(ell, 0.0);
  d.py_.assign(ell, 0.0);
  for (std::size_t x = 0; x < ell; ++x)
    for (std::size_t y = 0; y < ell; ++y) {
      d.px_[x] += d.joint_[x * ell + y];
      d.py_[y] += d.joint_[x * ell + y];
    }
  return d;
}

EdgeDistribution read_distribution(std::istream& in) {
  int ell = 0;
  if (!(in >> ell)) fail(Errc::config_parse, "distribution file: missing size line");
  if (ell < 2 || ell > 64) fail(Errc::non_square, "distribution size out of range");
  std::vector<std::vector<double>> raw(ell, std::vector<double>(ell));
  for (int x = 0; x < ell; ++x)
    for (int y = 0; y < ell; ++y)
      if (!(in >> raw[x][y])) fail(Errc::config_parse, "distribution file: truncated matrix");
  return validate_distribution(raw);
}

EdgeDistribution read_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  return read_distribution(in);
}

void write_distribution(std::ostream& out, const EdgeDistribution& dist) {
  out << dist.ell() << "\n";
  char buf[64];
  for (int x = 0; x < dist.ell(); ++x) {
    for (int y = 0; y < dist.ell(); ++y) {
      std::snprintf(buf, sizeof buf, "%.17g", dist.joint(x, y));
      out << (y ? " " : "") << buf;
    }
    out << "\n";
  }
}

Labeling::Labeling(std::vector<int> map) : map_(std::move(map)) {
  const int n = static_cast<int>(map_.size());
  std::vector<char> seen(n, 0);
  for (int v : map_) {
    if (v < 0 || v >= n || seen[v]) fail(Errc::out_of_range, "labeling is not a bijection");
    seen[v] = 1;
  }
}

Labeling Labeling::identity(int n) {
  Labeling l;
  l.map_.resize(n);
  for (int i = 0; i < n; ++i) l.map_[i] = i;
  return l;
}

Labeling Labeling::uniform_random(int n, RngStream& rng) {
  Labeling l = identity(n);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(l.map_[i], l.map_[j]);
  }
  return l;
}

Labeling Labeling::inverse() const {
  Labeling l;
  l.map_.resize(map_.size());
  for (int v = 0; v < n(); ++v) l.map_[map_[v]] = v;
  return l;
}

Labeling Labeling::compose(const Labeling& inner) const {
  if (inner.n() != n()) fail(Errc::dimension_mismatch, "compose: size mismatch");
  Labeling l;
  l.map_.resize(map_.size());
  for (int v = 0; v < n(); ++v) l.map_[v] = map_[inner.map_[v]];
  return l;
}

bool AttrMatrix::is_symmetric_zero_diag() const {
  for (int i = 0; i < n_; ++i) {
    if (at(i, i) != 0) return false;
    for (int j = i + 1; j < n_; ++j)
      if (at(i, j) != at(j, i)) return false;
  }
  return true;
}

std::uint64_t ut_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n || i == j) fail(Errc::out_of_range, "ut_index: bad pair");
  // 1-based closed form (i'-1)(2n-i')/2 + (j'-i') - 1 with i'=i+1, j'=j+1.
  const std::uint64_t i1 = static_cast<std::uint64_t>(i) + 1;
  return (i1 - 1) * (2 * static_cast<std::uint64_t>(n) - i1) / 2 + (static_cast<std::uint64_t>(j) - i) - 1;
}

UTVector ut_of(const AttrMatrix& adj) {
  if (!adj.is_symmetric_zero_diag()) fail(Errc::asymmetric_input, "ut_of needs symmetric, zero-diagonal input");
  const int n = adj.n();
  UTVector ut;
  ut.reserve(ut_length(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) ut.push_back(adj.at(i, j));
  return ut;
}

std::vector<std::uint64_t> induced_ut_permutation(const Labeling& sigma) {
  const int n = sigma.n();
  std::vector<std::uint64_t> pi(ut_length(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pi[ut_index(i, j, n)] = ut_index(sigma(i), sigma(j), n);
  return pi;
}

double accuracy(const Labeling& hat, const Labeling& truth) {
  if (hat.n() != truth.n()) fail(Errc::dimension_mismatch, "accuracy: size mismatch");
  int agree = 0;
  for (int v = 0; v < hat.n(); ++v)
    if (hat(v) == truth(v)) ++agree;
  return hat.n() == 0 ? 1.0 : static_cast<double>(agree) / hat.n();
}

}  // namespace tmatch
