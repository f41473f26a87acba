#pragma once

#include <cstdint>
#include <vector>

#include "tmatch/model.hpp"

namespace tmatch {

// Empirical joint distribution of two aligned attribute vectors.
struct JointType {
  int ell = 0;
  std::vector<std::uint64_t> counts;  // row-major ell x ell
  std::uint64_t length = 0;

  std::uint64_t count(int x, int y) const { return counts[static_cast<std::size_t>(x) * ell + y]; }
  double freq(int x, int y) const {
    return length == 0 ? 0.0 : static_cast<double>(count(x, y)) / static_cast<double>(length);
  }
};

struct TypicalityParams {
  double epsilon = 0.0;
};

JointType joint_type(const UTVector& u1, const UTVector& u2, int ell);

// Strong typicality: every cell's frequency within epsilon of the target
// (closed inequality), and exactly zero mass wherever the target is zero.
bool is_jointly_typical(const UTVector& u1, const UTVector& u2, const EdgeDistribution& dist,
                        const TypicalityParams& params);

// c * sqrt(ln N / N) with N = n(n-1)/2; the overload with a distribution
// additionally clamps to half its smallest positive cell (the regime where
// the achievability bound is stated).
double default_epsilon(int n, double c = 2.0);
double default_epsilon(int n, const EdgeDistribution& dist, double c = 2.0);

}  // namespace tmatch
