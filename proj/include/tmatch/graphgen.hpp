#pragma once

#include <iosfwd>
#include <optional>

#include "tmatch/model.hpp"
#include "tmatch/rng.hpp"

namespace tmatch {

// out(sigma(i), sigma(j)) = in(i, j).
AttrMatrix relabel(const AttrMatrix& adj, const Labeling& sigma);

// Draws each aligned label pair's attributes jointly from dist, independently
// across pairs. truth == nullopt draws the hidden labeling uniformly first.
GraphPair sample_pair(int n, const EdgeDistribution& dist, const std::optional<Labeling>& truth,
                      RngStream& rng);

// Edge-list text dump: one line "i j a1 a2" per pair, 1-based, i < j, where
// a1 = adj1 attribute on labels (i,j) and a2 = adj2 attribute on vertices.
void write_pair(std::ostream& out, const GraphPair& pair);

}  // namespace tmatch
