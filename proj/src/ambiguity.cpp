#include "tmatch/ambiguity.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace tmatch {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / 2.5066282746310002; }

std::string fmt_params(const char* pattern, double a, double b = 0.0, int argc = 1) {
  char buf[96];
  if (argc == 1)
    std::snprintf(buf, sizeof buf, pattern, a);
  else
    std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

class BetaFamily final : public PFamily {
 public:
  BetaFamily(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !(b > 0.0)) fail(Errc::invalid_family_params, "beta needs a,b > 0");
  }
  double sample(RngStream& rng) const override { return rng.beta(a_, b_); }
  double mean() const override { return a_ / (a_ + b_); }
  std::string tag() const override { return fmt_params("beta:%g,%g", a_, b_, 2); }

 private:
  double a_, b_;
};

class PointMassFamily final : public PFamily {
 public:
  explicit PointMassFamily(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) fail(Errc::invalid_family_params, "pointmass needs p in [0,1]");
  }
  double sample(RngStream&) const override { return p_; }
  double mean() const override { return p_; }
  std::string tag() const override { return fmt_params("pointmass:%g", p_); }

 private:
  double p_;
};

class TruncatedGaussianFamily final : public PFamily {
 public:
  TruncatedGaussianFamily(double mu, double var) : mu_(mu), var_(var) {
    if (!(var > 0.0)) fail(Errc::invalid_family_params, "truncgauss needs var > 0");
    const double sigma = std::sqrt(var);
    const double lo = (0.0 - mu) / sigma, hi = (1.0 - mu) / sigma;
    const double mass = normal_cdf(hi) - normal_cdf(lo);
    if (!(mass > 1e-12)) fail(Errc::invalid_family_params, "truncgauss has negligible mass in [0,1]");
    mean_ = mu + sigma * (normal_pdf(lo) - normal_pdf(hi)) / mass;
  }
  double sample(RngStream& rng) const override { return rng.truncated_gaussian01(mu_, var_); }
  double mean() const override { return mean_; }
  std::string tag() const override { return fmt_params("truncgauss:%g,%g", mu_, var_, 2); }

 private:
  double mu_, var_, mean_;
};

}  // namespace

int AmbiguityMatrix::row_popcount(int s) const {
  int c = 0;
  for (int i = 0; i < n_; ++i) c += get(s, i) ? 1 : 0;
  return c;
}

bool AmbiguityMatrix::contains_truth(const Labeling& truth) const {
  if (truth.n() != n_) fail(Errc::dimension_mismatch, "contains_truth: size mismatch");
  for (int s = 0; s < n_; ++s)
    if (!get(s, truth(s))) return false;
  return true;
}

std::unique_ptr<PFamily> make_beta_family(double a, double b) {
  return std::make_unique<BetaFamily>(a, b);
}
std::unique_ptr<PFamily> make_pointmass_family(double p) {
  return std::make_unique<PointMassFamily>(p);
}
std::unique_ptr<PFamily> make_truncated_gaussian_family(double mu, double var) {
  return std::make_unique<TruncatedGaussianFamily>(mu, var);
}

std::unique_ptr<PFamily> parse_family(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(Errc::invalid_family_params, "expected name:params in " + text);
  const std::string name = text.substr(0, colon);
  std::vector<double> args;
  std::string rest = text.substr(colon + 1);
  for (char& c : rest)
    if (c == ',') c = ' ';
  std::istringstream in(rest);
  double v;
  while (in >> v) args.push_back(v);
  if (name == "beta" && args.size() == 2) return make_beta_family(args[0], args[1]);
  if (name == "pointmass" && args.size() == 1) return make_pointmass_family(args[0]);
  if (name == "truncgauss" && args.size() == 2) return make_truncated_gaussian_family(args[0], args[1]);
  fail(Errc::invalid_family_params, "unrecognized family " + text);
}

SymmetricParams SymmetricParams::from_joint(double p00, double p01, double p10, double p11) {
  for (double v : {p00, p01, p10, p11})
    if (!(v >= 0.0)) fail(Errc::invalid_scenario_params, "joint bit pmf entries must be >= 0");
  if (std::fabs(p00 + p01 + p10 + p11 - 1.0) > 1e-9)
    fail(Errc::invalid_scenario_params, "joint bit pmf must sum to 1");
  SymmetricParams s{p00, p01, p10, p11};
  if (std::fabs(s.pu1() - s.pv1()) > 1e-12) fail(Errc::unequal_marginals, "P_U != P_V");
  return s;
}

SymmetricParams SymmetricParams::from_p11_marginal(double p11, double pu1) {
  const double p10 = pu1 - p11;
  const double p00 = 1.0 - 2.0 * pu1 + p11;
  if (!(p11 >= 0.0) || p10 < -1e-15 || p00 < -1e-15)
    fail(Errc::invalid_scenario_params, "inconsistent (p11, marginal) pair");
  return from_joint(std::max(p00, 0.0), std::max(p10, 0.0), std::max(p10, 0.0), p11);
}

double SymmetricParams::theta() const { return std::max(p11, pu1() * pv1()); }

AmbiguityMatrix gen_seeded(int n, const Labeling& truth, const SeededParams& params, RngStream& rng) {
  if (truth.n() != n) fail(Errc::dimension_mismatch, "gen_seeded: truth size mismatch");
  const double kf = params.gamma * n;
  const int k = static_cast<int>(std::llround(kf));
  if (params.gamma < 0.0 || params.gamma > 1.0 || std::fabs(kf - k) > 1e-9)
    fail(Errc::non_integral_seed_count, "gamma*n must be an integer in [0,n]");
  std::vector<int> verts(n);
  for (int v = 0; v < n; ++v) verts[v] = v;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
    std::swap(verts[i], verts[j]);
  }
  AmbiguityMatrix B(n, "seeded(gamma=" + std::to_string(params.gamma) + ")");
  std::vector<char> seeded(n, 0);
  for (int i = 0; i < k; ++i) seeded[verts[i]] = 1;
  for (int s = 0; s < n; ++s) {
    if (seeded[s]) {
      B.set(s, truth(s), true);
    } else {
      for (int i = 0; i < n; ++i) B.set(s, i, true);
    }
  }
  return B;
}

AmbiguityMatrix gen_equiprobable(int n, const Labeling& truth, const EquiprobableParams& params,
                                 RngStream& rng) {
  if (truth.n() != n) fail(Errc::dimension_mismatch, "gen_equiprobable: truth size mismatch");
  if (!(params.p >= 0.0 && params.p <= 1.0))
    fail(Errc::invalid_scenario_params, "p must be in [0,1]");
  AmbiguityMatrix B(n, "equiprobable(p=" + std::to_string(params.p) + ")");
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i)
      B.set(s, i, i == truth(s) ? true : rng.bernoulli(params.p));
  return B;
}

AmbiguityMatrix gen_random_p(int n, const Labeling& truth, const RandomPParams& params,
                             RngStream& rng) {
  if (truth.n() != n) fail(Errc::dimension_mismatch, "gen_random_p: truth size mismatch");
  if (!params.family) fail(Errc::invalid_family_params, "missing family");
  std::vector<double> col_p(n);
  for (int i = 0; i < n; ++i) col_p[i] = params.family->sample(rng);
  AmbiguityMatrix B(n, "randomp(" + params.family->tag() + ")");
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i)
      B.set(s, i, i == truth(s) ? true : rng.bernoulli(col_p[i]));
  return B;
}

AmbiguityMatrix gen_symmetric(int n, const Labeling& truth, const SymmetricParams& params,
                              RngStream& rng) {
  if (truth.n() != n) fail(Errc::dimension_mismatch, "gen_symmetric: truth size mismatch");
  if (std::fabs(params.pu1() - params.pv1()) > 1e-12) fail(Errc::unequal_marginals, "P_U != P_V");
  char tag[96];
  std::snprintf(tag, sizeof tag, "symmetric(p11=%g,pu1=%g)", params.p11, params.pu1());
  AmbiguityMatrix B(n, tag);
  const double pmf[4] = {params.p00, params.p01, params.p10, params.p11};
  for (int s = 0; s < n; ++s) B.set(s, truth(s), true);
  for (int s = 0; s < n; ++s) {
    for (int t = s + 1; t < n; ++t) {
      const int uv = rng.categorical(pmf, 4);
      B.set(s, truth(t), (uv & 2) != 0);
      B.set(t, truth(s), (uv & 1) != 0);
    }
  }
  return B;
}

namespace {

BigCount big_from_u128(unsigned __int128 v) {
  BigCount hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) + static_cast<std::uint64_t>(v);
}

}  // namespace

BigCount count_consistent_labelings_exact(const AmbiguityMatrix& B) {
  const int n = B.n();
  if (n > 30) fail(Errc::too_large, "exact counting capped at n=30");
  if (n == 0) return 1;
  std::vector<std::uint64_t> col_mask_per_row(n, 0);
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i)
      if (B.get(s, i)) col_mask_per_row[s] |= (1ULL << i);
  std::vector<int> rowsum(n, 0);
  BigCount total = 0;
  std::uint64_t prev = 0;
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t diff = gray ^ prev;
    const int j = std::countr_zero(diff);
    const int sign_col = (gray & diff) ? 1 : -1;
    for (int s = 0; s < n; ++s)
      if (col_mask_per_row[s] & (1ULL << j)) rowsum[s] += sign_col;
    prev = gray;
    unsigned __int128 prod = 1;
    bool zero = false;
    if (n <= 20) {  // rowsum products bounded by 20^20 < 2^127
      for (int s = 0; s < n; ++s) {
        if (rowsum[s] == 0) {
          zero = true;
          break;
        }
        prod *= static_cast<unsigned>(rowsum[s]);
      }
      if (zero) continue;
      const int parity = std::popcount(gray) & 1;
      if (parity)
        total -= big_from_u128(prod);
      else
        total += big_from_u128(prod);
    } else {
      BigCount big_prod = 1;
      for (int s = 0; s < n; ++s) {
        if (rowsum[s] == 0) {
          zero = true;
          break;
        }
        big_prod *= rowsum[s];
      }
      if (zero) continue;
      const int parity = std::popcount(gray) & 1;
      if (parity)
        total -= big_prod;
      else
        total += big_prod;
    }
  }
  if (n & 1) total = -total;
  return total;
}

std::uint64_t count_labelings_at_distance(int n, int i) {
  if (n < 0 || n > 20 || i < 0 || i > n) fail(Errc::out_of_range, "count_labelings_at_distance");
  const int m = n - i;
  std::uint64_t d = (m == 0) ? 1 : 0;
  std::uint64_t a = 1, b = 0;
  for (int k = 2; k <= m; ++k) {
    d = static_cast<std::uint64_t>(k - 1) * (a + b);
    a = b;
    b = d;
  }
  std::uint64_t binom = 1;
  for (int k = 1; k <= i; ++k) binom = binom * static_cast<std::uint64_t>(n - i + k) / k;
  return binom * d;
}

void write_ambiguity(std::ostream& out, const AmbiguityMatrix& B) {
  out << B.n() << "\n";
  for (int s = 0; s < B.n(); ++s) {
    for (int i = 0; i < B.n(); ++i) out << (B.get(s, i) ? '1' : '0');
    out << "\n";
  }
}

AmbiguityMatrix read_ambiguity(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n < 1 || n > 4096) fail(Errc::config_parse, "ambiguity file: bad size line");
  AmbiguityMatrix B(n, "file");
  std::string line;
  for (int s = 0; s < n; ++s) {
    if (!(in >> line) || static_cast<int>(line.size()) != n)
      fail(Errc::config_parse, "ambiguity file: bad row");
    for (int i = 0; i < n; ++i) {
      if (line[i] != '0' && line[i] != '1') fail(Errc::config_parse, "ambiguity file: bad bit");
      B.set(s, i, line[i] == '1');
    }
  }
  return B;
}

}  // namespace tmatch
