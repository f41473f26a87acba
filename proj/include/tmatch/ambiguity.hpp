#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tmatch/model.hpp"

namespace tmatch {

// Candidate-label sets, one row per vertex of the second graph: get(s, i) is
// true when label i is admissible for vertex s. Generators guarantee the true
// label is always present.
class AmbiguityMatrix {
 public:
  AmbiguityMatrix() = default;
  AmbiguityMatrix(int n, std::string model_tag)
      : n_(n), bits_(static_cast<std::size_t>(n) * n, 0), model_tag_(std::move(model_tag)) {}

  int n() const { return n_; }
  bool get(int s, int i) const { return bits_[static_cast<std::size_t>(s) * n_ + i] != 0; }
  void set(int s, int i, bool v) { bits_[static_cast<std::size_t>(s) * n_ + i] = v ? 1 : 0; }
  int row_popcount(int s) const;
  const std::string& model_tag() const { return model_tag_; }
  bool contains_truth(const Labeling& truth) const;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> bits_;
  std::string model_tag_;
};

struct SeededParams {
  double gamma = 0.0;
};

struct EquiprobableParams {
  double p = 1.0;
};

// Distribution over [0,1] for the shared per-label inclusion probability.
class PFamily {
 public:
  virtual ~PFamily() = default;
  virtual double sample(RngStream& rng) const = 0;
  virtual double mean() const = 0;
  virtual std::string tag() const = 0;
};

std::unique_ptr<PFamily> make_beta_family(double a, double b);
std::unique_ptr<PFamily> make_pointmass_family(double p);
std::unique_ptr<PFamily> make_truncated_gaussian_family(double mu, double var);

// Grammar: "beta:a,b" | "pointmass:p" | "truncgauss:mu,var".
std::unique_ptr<PFamily> parse_family(const std::string& text);

struct RandomPParams {
  std::shared_ptr<const PFamily> family;
};

// Joint pmf of the bit pair governing the two mirrored positions of each
// unordered vertex pair. Marginals must match within 1e-12.
struct SymmetricParams {
  double p00 = 0, p01 = 0, p10 = 0, p11 = 1;

  static SymmetricParams from_joint(double p00, double p01, double p10, double p11);
  // Builds the pmf from P(U=1,V=1) and the common marginal P(U=1)=P(V=1).
  static SymmetricParams from_p11_marginal(double p11, double pu1);

  double pu1() const { return p10 + p11; }
  double pv1() const { return p01 + p11; }
  double theta() const;  // max(p11, pu1*pv1)
};

AmbiguityMatrix gen_seeded(int n, const Labeling& truth, const SeededParams& params, RngStream& rng);
AmbiguityMatrix gen_equiprobable(int n, const Labeling& truth, const EquiprobableParams& params,
                                 RngStream& rng);
AmbiguityMatrix gen_random_p(int n, const Labeling& truth, const RandomPParams& params,
                             RngStream& rng);
AmbiguityMatrix gen_symmetric(int n, const Labeling& truth, const SymmetricParams& params,
                              RngStream& rng);

using BigCount = boost::multiprecision::int256_t;

// Exact number of labelings consistent with every row of B (the permanent of
// the 0/1 matrix), by Gray-coded inclusion-exclusion. n <= 30.
BigCount count_consistent_labelings_exact(const AmbiguityMatrix& B);

// Number of labelings of n vertices agreeing with a reference labeling on
// exactly i positions: C(n, i) * derangements(n - i). n <= 20 (fits uint64).
std::uint64_t count_labelings_at_distance(int n, int i);

// Text format: line 1 "n", then n lines of n characters '0'/'1'.
void write_ambiguity(std::ostream& out, const AmbiguityMatrix& B);
AmbiguityMatrix read_ambiguity(std::istream& in);

}  // namespace tmatch
