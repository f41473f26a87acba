#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "tmatch/graphgen.hpp"
#include "tmatch/typicality.hpp"

using namespace tmatch;
using test::make_dist;

namespace {

// adj2 is vertex-indexed; pushing it through the truth labeling aligns it
// with the label-indexed adj1 so aligned UT entries were drawn jointly.
UTVector aligned_ut2(const GraphPair& pair) { return ut_of(relabel(pair.adj2, pair.truth)); }

}  // namespace

TEST_SUITE("graphgen") {
  TEST_CASE("relabel identity and inversion") {
    RngStream rng(3, 0);
    AttrMatrix adj(6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) adj.set(i, j, static_cast<std::uint8_t>(rng.uniform_below(2)));

    const AttrMatrix same = relabel(adj, Labeling::identity(6));
    CHECK(ut_of(same) == ut_of(adj));

    const Labeling sigma = Labeling::uniform_random(6, rng);
    const AttrMatrix back = relabel(relabel(adj, sigma), sigma.inverse());
    CHECK(ut_of(back) == ut_of(adj));

    CHECK_FAILS(relabel(adj, Labeling::identity(5)), Errc::dimension_mismatch);
  }

  TEST_CASE("relabel moves a single edge") {
    AttrMatrix adj(3);
    adj.set(0, 1, 1);
    const AttrMatrix out = relabel(adj, Labeling({1, 2, 0}));
    CHECK(out.at(1, 2) == 1);
    CHECK(out.at(0, 1) == 0);
    CHECK(out.at(0, 2) == 0);
  }

  TEST_CASE("point-mass distribution forces identical graphs") {
    const EdgeDistribution d = make_dist({{0.0, 0.0}, {0.0, 1.0}});
    RngStream rng(5, 0);
    const GraphPair pair = sample_pair(6, d, Labeling::identity(6), rng);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        CHECK(pair.adj1.at(i, j) == (i == j ? 0 : 1));
        CHECK(pair.adj2.at(i, j) == (i == j ? 0 : 1));
      }
  }

  TEST_CASE("mismatched marginals land on the right graph") {
    // x is always 0, y is always 1.
    const EdgeDistribution d = make_dist({{0.0, 1.0}, {0.0, 0.0}});
    RngStream rng(5, 1);
    const GraphPair pair = sample_pair(5, d, std::nullopt, rng);
    for (const auto v : ut_of(pair.adj1)) CHECK(v == 0);
    for (const auto v : ut_of(pair.adj2)) CHECK(v == 1);
    CHECK(pair.truth.n() == 5);
  }

  TEST_CASE("sampling is deterministic per stream and validates inputs") {
    const EdgeDistribution d = make_dist({{0.4, 0.1}, {0.1, 0.4}});
    RngStream a(11, 4), b(11, 4);
    const GraphPair pa = sample_pair(12, d, std::nullopt, a);
    const GraphPair pb = sample_pair(12, d, std::nullopt, b);
    CHECK(pa.truth == pb.truth);
    CHECK(ut_of(pa.adj1) == ut_of(pb.adj1));
    CHECK(ut_of(pa.adj2) == ut_of(pb.adj2));

    RngStream c(11, 5);
    CHECK_FAILS(sample_pair(1, d, std::nullopt, c), Errc::invalid_n);
    CHECK_FAILS(sample_pair(4, d, Labeling::identity(5), c), Errc::dimension_mismatch);
  }

  TEST_CASE("product distribution gives uncorrelated aligned entries") {
    const EdgeDistribution d = make_dist({{0.06, 0.14}, {0.24, 0.56}});
    RngStream rng(17, 0);
    // N = 142*141/2 = 10011 aligned entries in one draw.
    const GraphPair pair = sample_pair(142, d, std::nullopt, rng);
    const UTVector u1 = ut_of(pair.adj1);
    const UTVector u2 = aligned_ut2(pair);
    const double m = static_cast<double>(u1.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t k = 0; k < u1.size(); ++k) {
      sx += u1[k];
      sy += u2[k];
      sxx += u1[k] * u1[k];
      syy += u2[k] * u2[k];
      sxy += static_cast<double>(u1[k]) * u2[k];
    }
    const double cov = sxy / m - (sx / m) * (sy / m);
    const double vx = sxx / m - (sx / m) * (sx / m);
    const double vy = syy / m - (sy / m) * (sy / m);
    const double corr = cov / std::sqrt(vx * vy);
    CHECK(std::fabs(corr) < 0.05);
  }

  TEST_CASE("aligned joint type concentrates at n=200") {
    const EdgeDistribution d = make_dist({{0.4, 0.1}, {0.1, 0.4}});
    int within = 0;
    for (int trial = 0; trial < 100; ++trial) {
      RngStream rng(99, static_cast<std::uint64_t>(trial));
      const GraphPair pair = sample_pair(200, d, std::nullopt, rng);
      const JointType t = joint_type(ut_of(pair.adj1), aligned_ut2(pair), 2);
      double linf = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) linf = std::max(linf, std::fabs(t.freq(x, y) - d.joint(x, y)));
      if (linf <= 0.02) ++within;
    }
    CHECK(within >= 95);
  }

  TEST_CASE("write_pair emits one line per unordered pair") {
    const EdgeDistribution d = make_dist({{0.0, 0.0}, {0.0, 1.0}});
    RngStream rng(1, 0);
    GraphPair pair = sample_pair(3, d, Labeling::identity(3), rng);
    pair.adj1.set(0, 2, 0);  // make the dump distinguish the two graphs
    std::ostringstream out;
    write_pair(out, pair);
    CHECK(out.str() == "1 2 1 1\n1 3 0 1\n2 3 1 1\n");
  }
}
