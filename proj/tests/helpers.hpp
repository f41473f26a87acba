#pragma once

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "tmatch/errors.hpp"
#include "tmatch/model.hpp"

// Checks that the expression throws a DomainError carrying the given code.
#define CHECK_FAILS(expr, errc)                                     \
  do {                                                              \
    bool caught_ = false;                                           \
    try {                                                           \
      (void)(expr);                                                 \
    } catch (const tmatch::DomainError& e_) {                       \
      caught_ = true;                                               \
      CHECK_MESSAGE(e_.code() == (errc), "wrong code: " << e_.what()); \
    }                                                               \
    CHECK_MESSAGE(caught_, #expr " did not throw");                 \
  } while (0)

namespace tmatch::test {

inline EdgeDistribution make_dist(const std::vector<std::vector<double>>& rows) {
  return validate_distribution(rows);
}

// Visits every permutation of {0, ..., n-1}.
template <typename F>
void for_each_permutation(int n, F&& f) {
  std::vector<int> map(n);
  std::iota(map.begin(), map.end(), 0);
  do {
    f(map);
  } while (std::next_permutation(map.begin(), map.end()));
}

}  // namespace tmatch::test
