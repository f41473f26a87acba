#include "tmatch/typicality.hpp"

#include <algorithm>
#include <cmath>

namespace tmatch {

JointType joint_type(const UTVector& u1, const UTVector& u2, int ell) {
  if (u1.size() != u2.size()) fail(Errc::length_mismatch, "joint_type: unequal lengths");
  JointType t;
  t.ell = ell;
  t.counts.assign(static_cast<std::size_t>(ell) * ell, 0);
  t.length = u1.size();
  for (std::size_t k = 0; k < u1.size(); ++k) {
    ++t.counts[static_cast<std::size_t>(u1[k]) * ell + u2[k]];
  }
  return t;
}

bool is_jointly_typical(const UTVector& u1, const UTVector& u2, const EdgeDistribution& dist,
                        const TypicalityParams& params) {
  const JointType t = joint_type(u1, u2, dist.ell());
  for (int x = 0; x < dist.ell(); ++x) {
    for (int y = 0; y < dist.ell(); ++y) {
      const double p = dist.joint(x, y);
      if (p == 0.0) {
        if (t.count(x, y) != 0) return false;
      } else if (std::fabs(t.freq(x, y) - p) > params.epsilon + 1e-12) {
        return false;
      }
    }
  }
  return true;
}

double default_epsilon(int n, double c) {
  if (n < 2) fail(Errc::invalid_n, "default_epsilon needs n >= 2");
  const double N = static_cast<double>(ut_length(n));
  return c * std::sqrt(std::log(N) / N);
}

double default_epsilon(int n, const EdgeDistribution& dist, double c) {
  return std::min(default_epsilon(n, c), 0.5 * dist.min_nonzero_joint());
}

}  // namespace tmatch
