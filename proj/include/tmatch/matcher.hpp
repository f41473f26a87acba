#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tmatch/ambiguity.hpp"
#include "tmatch/model.hpp"
#include "tmatch/typicality.hpp"

namespace tmatch {

struct SearchBudget {
  std::uint64_t node_budget = 10'000'000;  // attempted vertex-label assignments
  std::size_t store_cap = 4096;            // labelings kept for inspection
};

struct CandidateSet {
  std::vector<Labeling> labelings;   // first store_cap found, enumeration order
  std::uint64_t total_count = 0;     // full count, including unstored ones
  bool truncated = false;
  std::uint64_t nodes_explored = 0;
};

// Enumerates every labeling consistent with B (perfect matchings of the
// vertex-label bipartite graph) by backtracking with forward checking,
// most-constrained vertices first.
CandidateSet enumerate_consistent(const AmbiguityMatrix& B, const SearchBudget& budget = {});

struct MatchResult {
  std::optional<Labeling> chosen;    // empty = Failure (no consistent typical labeling)
  std::uint64_t candidate_count = 0;
  double accuracy = 0.0;             // vs. pair.truth; 0 when failed
  bool truncated = false;
  std::uint64_t nodes_explored = 0;
  CandidateSet candidates;           // capped view of the full set
};

// Typicality matching: intersect the consistent labelings with those whose
// relabeled attribute vectors are jointly typical for pair.dist, then pick
// uniformly at random (reservoir selection over the enumeration, so the
// choice is uniform over the full set even when storage is capped).
MatchResult tm_match(const GraphPair& pair, const AmbiguityMatrix& B,
                     const TypicalityParams& params, RngStream& rng,
                     const SearchBudget& budget = {});

}  // namespace tmatch
