#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "tmatch/model.hpp"
#include "tmatch/rng.hpp"

using namespace tmatch;
using test::make_dist;

namespace {

// Independent re-statement of relabeling: out(sigma(i), sigma(j)) = in(i, j).
AttrMatrix relabel_oracle(const AttrMatrix& adj, const Labeling& sigma) {
  AttrMatrix out(adj.n());
  for (int i = 0; i < adj.n(); ++i)
    for (int j = i + 1; j < adj.n(); ++j) out.set(sigma(i), sigma(j), adj.at(i, j));
  return out;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("distribution marginals and support") {
    const EdgeDistribution d = make_dist({{0.4, 0.1}, {0.1, 0.4}});
    CHECK(d.ell() == 2);
    CHECK(d.px(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.px(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.py(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.py(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(d.is_product());

    const EdgeDistribution diag = make_dist({{0.5, 0.0}, {0.0, 0.5}});
    CHECK(diag.in_support(0, 0));
    CHECK(diag.in_support(1, 1));
    CHECK_FALSE(diag.in_support(0, 1));
    CHECK_FALSE(diag.in_support(1, 0));
    CHECK(diag.min_nonzero_joint() == doctest::Approx(0.5));

    const EdgeDistribution prod = make_dist({{0.06, 0.14}, {0.24, 0.56}});
    CHECK(prod.is_product());
  }

  TEST_CASE("distribution validation errors") {
    CHECK_FAILS(make_dist({{0.3, 0.3}, {0.3, 0.3}}), Errc::not_normalized);
    CHECK_FAILS(make_dist({{0.5, 0.5}, {0.5}}), Errc::non_square);
    CHECK_FAILS(make_dist({{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}), Errc::non_square);
    CHECK_FAILS(make_dist({{1.2, -0.2}, {0.0, 0.0}}), Errc::negative_entry);
    CHECK_FAILS(make_dist({{1.0}}), Errc::non_square);  // needs ell >= 2
  }

  TEST_CASE("distribution normalization is exact after validation") {
    // 1e-7 off: accepted, then renormalized to an exact unit sum.
    const EdgeDistribution d = make_dist({{0.4, 0.1}, {0.1, 0.4 + 1e-7}});
    double sum = 0.0;
    for (double v : d.flat()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("distribution text round trip") {
    const EdgeDistribution d = make_dist({{0.2, 0.3, 0.0}, {0.1, 0.05, 0.05}, {0.0, 0.1, 0.2}});
    std::stringstream buf;
    write_distribution(buf, d);
    const EdgeDistribution back = read_distribution(buf);
    REQUIRE(back.ell() == 3);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) CHECK(back.joint(x, y) == doctest::Approx(d.joint(x, y)).epsilon(1e-12));
    std::stringstream bad("2\n0.5 0.5\n");
    CHECK_THROWS_AS(read_distribution(bad), DomainError);
  }

  TEST_CASE("ut_index matches the enumeration order") {
    for (int n : {2, 3, 4, 7, 13}) {
      std::uint64_t next = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          CHECK(ut_index(i, j, n) == next);
          CHECK(ut_index(j, i, n) == next);  // unordered
          ++next;
        }
      CHECK(next == ut_length(n));
    }
    // Pairs of 4 vertices in order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
    CHECK(ut_index(1, 2, 4) == 3);
    CHECK(ut_index(2, 3, 4) == 5);
  }

  TEST_CASE("ut_of reads the upper triangle") {
    AttrMatrix adj(3);
    adj.set(0, 1, 1);
    adj.set(0, 2, 0);
    adj.set(1, 2, 1);
    const UTVector u = ut_of(adj);
    REQUIRE(u.size() == 3);
    CHECK(u[0] == 1);
    CHECK(u[1] == 0);
    CHECK(u[2] == 1);

    AttrMatrix two(2);
    two.set(0, 1, 1);
    CHECK(ut_of(two).size() == 1);
  }

  TEST_CASE("ut_of rejects a nonzero diagonal") {
    // The fill constructor writes the diagonal too.
    AttrMatrix bad(3, 1);
    CHECK(!bad.is_symmetric_zero_diag());
    CHECK_FAILS(ut_of(bad), Errc::asymmetric_input);
  }

  TEST_CASE("labeling bijection checks") {
    CHECK_FAILS(Labeling({0, 0, 1}), Errc::out_of_range);
    CHECK_FAILS(Labeling({0, 3, 1}), Errc::out_of_range);
    const Labeling sigma({2, 0, 1});
    const Labeling inv = sigma.inverse();
    for (int v = 0; v < 3; ++v) CHECK(inv(sigma(v)) == v);
    CHECK(sigma.compose(inv) == Labeling::identity(3));
    CHECK(inv.compose(sigma) == Labeling::identity(3));
  }

  TEST_CASE("uniform_random labelings are bijections and deterministic") {
    RngStream a(42, 0), b(42, 0), c(42, 1);
    const Labeling la = Labeling::uniform_random(10, a);
    const Labeling lb = Labeling::uniform_random(10, b);
    const Labeling lc = Labeling::uniform_random(10, c);
    CHECK(la == lb);
    CHECK(la.inverse().inverse() == la);
    CHECK_FALSE(la == lc);  // different stream id
  }

  TEST_CASE("induced_ut_permutation identity and transposition") {
    const auto pi_id = induced_ut_permutation(Labeling::identity(5));
    for (std::uint64_t k = 0; k < ut_length(5); ++k) CHECK(pi_id[k] == k);

    // Swap vertices 0 and 1 on n=3: pair {0,1} fixed, {0,2} <-> {1,2}.
    const auto pi = induced_ut_permutation(Labeling({1, 0, 2}));
    CHECK(pi[ut_index(0, 1, 3)] == ut_index(0, 1, 3));
    CHECK(pi[ut_index(0, 2, 3)] == ut_index(1, 2, 3));
    CHECK(pi[ut_index(1, 2, 3)] == ut_index(0, 2, 3));
    int fixed = 0;
    for (std::uint64_t k = 0; k < 3; ++k) fixed += pi[k] == k ? 1 : 0;
    CHECK(fixed == 1);
  }

  TEST_CASE("induced_ut_permutation aligns relabeled attribute vectors") {
    RngStream rng(7, 0);
    for (int n : {2, 3, 5, 9}) {
      AttrMatrix adj(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) adj.set(i, j, static_cast<std::uint8_t>(rng.uniform_below(3)));
      const Labeling sigma = Labeling::uniform_random(n, rng);
      const auto pi = induced_ut_permutation(sigma);
      const UTVector before = ut_of(adj);
      const UTVector after = ut_of(relabel_oracle(adj, sigma));
      for (std::uint64_t k = 0; k < ut_length(n); ++k) CHECK(after[pi[k]] == before[k]);
    }
  }

  TEST_CASE("pair fixed points dominate the k(k-1)/2 bound (exhaustive n <= 6)") {
    for (int n = 2; n <= 6; ++n) {
      test::for_each_permutation(n, [&](const std::vector<int>& map) {
        const Labeling sigma(map);
        const auto pi = induced_ut_permutation(sigma);
        std::uint64_t pair_fixed = 0;
        for (std::uint64_t k = 0; k < ut_length(n); ++k) pair_fixed += pi[k] == k ? 1 : 0;

        std::uint64_t vertex_fixed = 0, two_cycles = 0;
        for (int v = 0; v < n; ++v) {
          if (map[v] == v) ++vertex_fixed;
          if (map[v] > v && map[map[v]] == v) ++two_cycles;
        }
        CHECK(pair_fixed == vertex_fixed * (vertex_fixed - 1) / 2 + two_cycles);
        CHECK(pair_fixed >= vertex_fixed * (vertex_fixed - 1) / 2);
        if (two_cycles == 0) CHECK(pair_fixed == vertex_fixed * (vertex_fixed - 1) / 2);
      });
    }
  }

  TEST_CASE("accuracy counts agreeing vertices") {
    const Labeling truth({0, 1, 2, 3});
    CHECK(accuracy(truth, truth) == 1.0);
    CHECK(accuracy(Labeling({1, 2, 3, 0}), truth) == 0.0);  // derangement
    CHECK(accuracy(Labeling({0, 1, 3, 2}), truth) == 0.5);  // agree on 2 of 4
    CHECK_FAILS(accuracy(Labeling({0, 1}), truth), Errc::dimension_mismatch);
  }
}
