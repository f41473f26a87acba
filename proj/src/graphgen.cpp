#include "tmatch/graphgen.hpp"

#include <ostream>

namespace tmatch {

AttrMatrix relabel(const AttrMatrix& adj, const Labeling& sigma) {
  if (sigma.n() != adj.n()) fail(Errc::dimension_mismatch, "relabel: size mismatch");
  const int n = adj.n();
  AttrMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.set(sigma(i), sigma(j), adj.at(i, j));
  return out;
}

GraphPair sample_pair(int n, const EdgeDistribution& dist, const std::optional<Labeling>& truth,
                      RngStream& rng) {
  if (n < 2) fail(Errc::invalid_n, "need n >= 2");
  GraphPair pair;
  pair.n = n;
  pair.dist = dist;
  pair.truth = truth ? *truth : Labeling::uniform_random(n, rng);
  if (pair.truth.n() != n) fail(Errc::dimension_mismatch, "truth labeling size mismatch");
  const Labeling inv = pair.truth.inverse();
  const int ell = dist.ell();
  pair.adj1 = AttrMatrix(n);
  pair.adj2 = AttrMatrix(n);
  const double* pmf = dist.flat().data();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int cell = rng.categorical(pmf, ell * ell);
      pair.adj1.set(i, j, static_cast<std::uint8_t>(cell / ell));
      pair.adj2.set(inv(i), inv(j), static_cast<std::uint8_t>(cell % ell));
    }
  }
  return pair;
}

void write_pair(std::ostream& out, const GraphPair& pair) {
  for (int i = 0; i < pair.n; ++i)
    for (int j = i + 1; j < pair.n; ++j)
      out << (i + 1) << ' ' << (j + 1) << ' ' << int(pair.adj1.at(i, j)) << ' '
          << int(pair.adj2.at(i, j)) << "\n";
}

}  // namespace tmatch
