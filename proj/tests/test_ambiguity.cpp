#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "tmatch/ambiguity.hpp"

using namespace tmatch;

namespace {

std::uint64_t brute_force_consistent_count(const AmbiguityMatrix& B) {
  std::uint64_t count = 0;
  test::for_each_permutation(B.n(), [&](const std::vector<int>& map) {
    for (int s = 0; s < B.n(); ++s)
      if (!B.get(s, map[s])) return;
    ++count;
  });
  return count;
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int k = 1; k < panels; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

AmbiguityMatrix all_ones(int n) {
  AmbiguityMatrix B(n, "test");
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i) B.set(s, i, true);
  return B;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

}  // namespace

TEST_SUITE("ambiguity") {
  TEST_CASE("seeded generator row structure") {
    RngStream rng(21, 0);
    const Labeling truth = Labeling::uniform_random(10, rng);

    const AmbiguityMatrix full = gen_seeded(10, truth, SeededParams{0.0}, rng);
    for (int s = 0; s < 10; ++s) CHECK(full.row_popcount(s) == 10);

    const AmbiguityMatrix pinned = gen_seeded(10, truth, SeededParams{1.0}, rng);
    for (int s = 0; s < 10; ++s) {
      CHECK(pinned.row_popcount(s) == 1);
      CHECK(pinned.get(s, truth(s)));
    }

    const AmbiguityMatrix half = gen_seeded(10, truth, SeededParams{0.5}, rng);
    int singles = 0, fulls = 0;
    for (int s = 0; s < 10; ++s) {
      if (half.row_popcount(s) == 1) ++singles;
      if (half.row_popcount(s) == 10) ++fulls;
    }
    CHECK(singles == 5);
    CHECK(fulls == 5);
    CHECK(half.contains_truth(truth));

    CHECK_FAILS(gen_seeded(10, truth, SeededParams{0.25001}, rng), Errc::non_integral_seed_count);
    CHECK_FAILS(gen_seeded(10, truth, SeededParams{-0.1}, rng), Errc::non_integral_seed_count);
  }

  TEST_CASE("seeded subset choice is uniform-ish across streams") {
    const Labeling truth = Labeling::identity(6);
    std::map<int, int> seen_counts;
    for (int t = 0; t < 600; ++t) {
      RngStream rng(33, static_cast<std::uint64_t>(t));
      const AmbiguityMatrix B = gen_seeded(6, truth, SeededParams{0.5}, rng);
      for (int s = 0; s < 6; ++s)
        if (B.row_popcount(s) == 1) ++seen_counts[s];
    }
    // Every vertex is seeded ~300 times out of 600 draws of 3-of-6 subsets.
    for (int s = 0; s < 6; ++s) {
      CHECK(seen_counts[s] > 220);
      CHECK(seen_counts[s] < 380);
    }
  }

  TEST_CASE("equiprobable generator extremes and mean row size") {
    RngStream rng(5, 0);
    const Labeling truth = Labeling::uniform_random(8, rng);

    const AmbiguityMatrix perm = gen_equiprobable(8, truth, EquiprobableParams{0.0}, rng);
    for (int s = 0; s < 8; ++s) {
      CHECK(perm.row_popcount(s) == 1);
      CHECK(perm.get(s, truth(s)));
    }
    const AmbiguityMatrix full = gen_equiprobable(8, truth, EquiprobableParams{1.0}, rng);
    for (int s = 0; s < 8; ++s) CHECK(full.row_popcount(s) == 8);

    CHECK_FAILS(gen_equiprobable(8, truth, EquiprobableParams{1.5}, rng), Errc::invalid_scenario_params);

    const Labeling big_truth = Labeling::identity(100);
    double total_rows = 0.0;
    for (int t = 0; t < 1000; ++t) {
      RngStream r(40, static_cast<std::uint64_t>(t));
      const AmbiguityMatrix B = gen_equiprobable(100, big_truth, EquiprobableParams{0.3}, r);
      for (int s = 0; s < 100; ++s) total_rows += B.row_popcount(s);
    }
    const double mean_row = total_rows / (1000.0 * 100.0);
    CHECK(std::fabs(mean_row - (1.0 + 99.0 * 0.3)) < 1.0);
  }

  TEST_CASE("random-p families: parsing, means, sampling") {
    CHECK(make_pointmass_family(0.25)->mean() == 0.25);
    CHECK(make_beta_family(2.0, 6.0)->mean() == doctest::Approx(0.25).epsilon(1e-15));

    CHECK(parse_family("beta:2,6")->tag() == "beta:2,6");
    CHECK(parse_family("pointmass:0.5")->tag() == "pointmass:0.5");
    CHECK(parse_family("truncgauss:0.3,0.01")->tag() == "truncgauss:0.3,0.01");
    CHECK_FAILS(parse_family("beta:2"), Errc::invalid_family_params);
    CHECK_FAILS(parse_family("nope:1"), Errc::invalid_family_params);
    CHECK_FAILS(parse_family("beta"), Errc::invalid_family_params);
    CHECK_FAILS(make_beta_family(0.0, 1.0), Errc::invalid_family_params);
    CHECK_FAILS(make_pointmass_family(1.2), Errc::invalid_family_params);
    CHECK_FAILS(make_truncated_gaussian_family(0.5, 0.0), Errc::invalid_family_params);
    CHECK_FAILS(make_truncated_gaussian_family(80.0, 0.01), Errc::invalid_family_params);

    // Closed-form truncated-Gaussian mean vs. direct numerical integration.
    for (auto [mu, var] : {std::pair{0.3, 0.04}, {0.9, 0.25}, {-0.2, 0.09}}) {
      const auto fam = make_truncated_gaussian_family(mu, var);
      const double sigma = std::sqrt(var);
      auto density = [&](double x) {
        const double z = (x - mu) / sigma;
        return std::exp(-0.5 * z * z);
      };
      const double mass = simpson(density, 0.0, 1.0, 20000);
      const double first = simpson([&](double x) { return x * density(x); }, 0.0, 1.0, 20000);
      CHECK(fam->mean() == doctest::Approx(first / mass).epsilon(1e-9));
    }

    // Sample means track the analytic means.
    for (const char* text : {"beta:2,6", "truncgauss:0.3,0.04", "pointmass:0.37"}) {
      const auto fam = parse_family(text);
      RngStream rng(8, 1);
      double sum = 0.0;
      for (int k = 0; k < 20000; ++k) sum += fam->sample(rng);
      CHECK(std::fabs(sum / 20000.0 - fam->mean()) < 0.01);
    }
  }

  TEST_CASE("random-p generator matches its family") {
    RngStream rng(9, 0);
    const Labeling truth = Labeling::uniform_random(30, rng);

    // Point mass p behaves like the equiprobable generator.
    double rows_pm = 0.0, rows_eq = 0.0;
    for (int t = 0; t < 1000; ++t) {
      RngStream r1(10, static_cast<std::uint64_t>(t)), r2(11, static_cast<std::uint64_t>(t));
      const RandomPParams params{std::shared_ptr<const PFamily>(make_pointmass_family(0.3))};
      const AmbiguityMatrix a = gen_random_p(30, truth, params, r1);
      const AmbiguityMatrix b = gen_equiprobable(30, truth, EquiprobableParams{0.3}, r2);
      CHECK(a.contains_truth(truth));
      for (int s = 0; s < 30; ++s) {
        rows_pm += a.row_popcount(s);
        rows_eq += b.row_popcount(s);
      }
    }
    CHECK(std::fabs(rows_pm / 30000.0 - rows_eq / 30000.0) < 1.0);

    // Beta(1,1) = uniform: off-truth bit density 0.5.
    const Labeling t50 = Labeling::identity(50);
    double bits = 0.0;
    for (int t = 0; t < 1000; ++t) {
      RngStream r(12, static_cast<std::uint64_t>(t));
      const RandomPParams params{std::shared_ptr<const PFamily>(make_beta_family(1.0, 1.0))};
      const AmbiguityMatrix B = gen_random_p(50, t50, params, r);
      for (int s = 0; s < 50; ++s) bits += B.row_popcount(s) - 1;  // drop the forced truth bit
    }
    const double density = bits / (1000.0 * 50.0 * 49.0);
    CHECK(std::fabs(density - 0.5) < 0.02);
  }

  TEST_CASE("symmetric generator extremes, symmetry and validation") {
    RngStream rng(13, 0);
    const Labeling truth = Labeling::uniform_random(12, rng);

    const AmbiguityMatrix full = gen_symmetric(12, truth, SymmetricParams::from_joint(0, 0, 0, 1), rng);
    for (int s = 0; s < 12; ++s) CHECK(full.row_popcount(s) == 12);

    const AmbiguityMatrix perm = gen_symmetric(12, truth, SymmetricParams::from_joint(1, 0, 0, 0), rng);
    for (int s = 0; s < 12; ++s) {
      CHECK(perm.row_popcount(s) == 1);
      CHECK(perm.get(s, truth(s)));
    }

    CHECK_FAILS(SymmetricParams::from_joint(0.1, 0.3, 0.2, 0.4), Errc::unequal_marginals);
    CHECK_FAILS(SymmetricParams::from_joint(0.5, 0.2, 0.2, 0.2), Errc::invalid_scenario_params);
    CHECK_FAILS(SymmetricParams::from_p11_marginal(0.5, 0.4), Errc::invalid_scenario_params);

    const SymmetricParams corr = SymmetricParams::from_joint(0.6, 0.0, 0.0, 0.4);
    CHECK(corr.theta() == doctest::Approx(0.4));
    CHECK(SymmetricParams::from_p11_marginal(0.16, 0.4).theta() == doctest::Approx(0.16));

    // Perfect correlation forces mirrored bits to agree.
    std::uint64_t agree = 0, pairs = 0;
    for (int t = 0; t < 25; ++t) {
      RngStream r(14, static_cast<std::uint64_t>(t));
      const AmbiguityMatrix B = gen_symmetric(12, truth, corr, r);
      CHECK(B.contains_truth(truth));
      for (int s = 0; s < 12; ++s)
        for (int u = s + 1; u < 12; ++u) {
          ++pairs;
          if (B.get(s, truth(u)) == B.get(u, truth(s))) ++agree;
        }
    }
    CHECK(pairs >= 1000);
    CHECK(static_cast<double>(agree) / pairs >= 0.99);
  }

  TEST_CASE("exact consistent-labeling counts: known values") {
    CHECK(count_consistent_labelings_exact(all_ones(3)) == 6);

    RngStream rng(15, 0);
    const Labeling truth = Labeling::uniform_random(7, rng);
    const AmbiguityMatrix perm = gen_seeded(7, truth, SeededParams{1.0}, rng);
    CHECK(count_consistent_labelings_exact(perm) == 1);

    AmbiguityMatrix dead = all_ones(4);
    for (int i = 0; i < 4; ++i) dead.set(2, i, false);
    CHECK(count_consistent_labelings_exact(dead) == 0);

    CHECK_FAILS(count_consistent_labelings_exact(all_ones(31)), Errc::too_large);
  }

  TEST_CASE("exact counts match the brute-force filter for random matrices") {
    for (int trial = 0; trial < 30; ++trial) {
      RngStream rng(16, static_cast<std::uint64_t>(trial));
      const int n = 2 + static_cast<int>(rng.uniform_below(6));  // 2..7
      const Labeling truth = Labeling::uniform_random(n, rng);
      AmbiguityMatrix B = gen_equiprobable(n, truth, EquiprobableParams{0.35}, rng);
      if (trial % 3 == 0) B.set(0, truth(0), false);  // also cover truth-free matrices
      CHECK(count_consistent_labelings_exact(B) == BigCount(brute_force_consistent_count(B)));
    }
  }

  TEST_CASE("exact count of an all-ones matrix is a factorial beyond 64 bits") {
    BigCount expect = 1;
    for (int k = 2; k <= 21; ++k) expect *= k;
    CHECK(expect > BigCount("18446744073709551615"));  // 21! does not fit u64
    CHECK(count_consistent_labelings_exact(all_ones(21)) == expect);
  }

  TEST_CASE("labelings at a given agreement distance") {
    CHECK(count_labelings_at_distance(3, 0) == 2);
    CHECK(count_labelings_at_distance(4, 4) == 1);
    CHECK(count_labelings_at_distance(5, 4) == 0);  // fixing n-1 fixes all n

    for (int n = 1; n <= 10; ++n) {
      std::uint64_t sum = 0;
      for (int i = 0; i <= n; ++i) sum += count_labelings_at_distance(n, i);
      CHECK(sum == factorial(n));
    }

    // Oracle: histogram of fixed-point counts over all permutations.
    for (int n = 2; n <= 8; ++n) {
      std::vector<std::uint64_t> histogram(n + 1, 0);
      test::for_each_permutation(n, [&](const std::vector<int>& map) {
        int fixed = 0;
        for (int v = 0; v < n; ++v)
          if (map[v] == v) ++fixed;
        ++histogram[fixed];
      });
      for (int i = 0; i <= n; ++i) CHECK(count_labelings_at_distance(n, i) == histogram[i]);
    }

    CHECK_FAILS(count_labelings_at_distance(21, 0), Errc::out_of_range);
    CHECK_FAILS(count_labelings_at_distance(5, 6), Errc::out_of_range);
    CHECK_FAILS(count_labelings_at_distance(5, -1), Errc::out_of_range);
  }

  TEST_CASE("ambiguity text round trip") {
    RngStream rng(18, 0);
    const Labeling truth = Labeling::uniform_random(9, rng);
    const AmbiguityMatrix B = gen_equiprobable(9, truth, EquiprobableParams{0.4}, rng);
    std::stringstream buf;
    write_ambiguity(buf, B);
    const AmbiguityMatrix back = read_ambiguity(buf);
    REQUIRE(back.n() == 9);
    for (int s = 0; s < 9; ++s)
      for (int i = 0; i < 9; ++i) CHECK(back.get(s, i) == B.get(s, i));

    std::stringstream bad1("2\n01\n");
    CHECK_FAILS(read_ambiguity(bad1), Errc::config_parse);
    std::stringstream bad2("2\n01\n2x\n");
    CHECK_FAILS(read_ambiguity(bad2), Errc::config_parse);
  }
}
