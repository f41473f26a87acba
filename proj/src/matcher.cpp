#include "tmatch/matcher.hpp"

#include <algorithm>
#include <cmath>

namespace tmatch {

namespace {

// Backtracking over vertices (most-constrained first) with forward checking
// on label availability. Optional incremental typicality pruning: a partial
// assignment dies as soon as some joint-type cell overshoots its admissible
// count, which never cuts a completable typical labeling since counts only
// grow along a branch.
class Search {
 public:
  Search(const AmbiguityMatrix& B, const SearchBudget& budget) : B_(B), n_(B.n()), budget_(budget) {
    order_.resize(n_);
    for (int v = 0; v < n_; ++v) order_[v] = v;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return B.row_popcount(a) < B.row_popcount(b); });
    assigned_.assign(n_, -1);
    label_used_.assign(n_, 0);
    domain_left_.resize(n_);
    for (int v = 0; v < n_; ++v) domain_left_[v] = B.row_popcount(v);
    label_vertices_.resize(n_);
    for (int i = 0; i < n_; ++i)
      for (int v = 0; v < n_; ++v)
        if (B.get(v, i)) label_vertices_[i].push_back(v);
  }

  void enable_typicality(const GraphPair& pair, double epsilon) {
    use_typ_ = true;
    pair_ = &pair;
    ell_ = pair.dist.ell();
    const auto N = ut_length(n_);
    counts_.assign(static_cast<std::size_t>(ell_) * ell_, 0);
    cap_.resize(counts_.size());
    target_.resize(counts_.size());
    epsilon_ = epsilon;
    for (int x = 0; x < ell_; ++x)
      for (int y = 0; y < ell_; ++y) {
        const double p = pair.dist.joint(x, y);
        target_[x * ell_ + y] = p;
        cap_[x * ell_ + y] =
            p == 0.0 ? 0
                     : static_cast<std::int64_t>(std::floor((p + epsilon) * static_cast<double>(N) + 1e-9));
      }
  }

  CandidateSet run(RngStream* rng, std::vector<int>* selected_out) {
    CandidateSet out;
    for (int v = 0; v < n_; ++v) {
      if (B_.row_popcount(v) == 0) return out;  // no consistent labeling at all
    }
    rng_ = rng;
    selected_out_ = selected_out;
    descend(0, out);
    out.nodes_explored = nodes_;
    out.truncated = truncated_;
    return out;
  }

 private:
  // Returns false when the node budget aborted the whole search.
  bool descend(int depth, CandidateSet& out) {
    if (depth == n_) {
      if (use_typ_ && !final_type_ok()) return true;
      ++out.total_count;
      if (out.labelings.size() < budget_.store_cap) out.labelings.emplace_back(assigned_);
      if (selected_out_ && rng_ && rng_->uniform_below(out.total_count) == 0) *selected_out_ = assigned_;
      return true;
    }
    const int v = order_[depth];
    for (int a = 0; a < n_; ++a) {
      if (!B_.get(v, a) || label_used_[a]) continue;
      if (++nodes_ > budget_.node_budget) {
        truncated_ = true;
        return false;
      }
      int increments = 0;
      bool ok = true;
      if (use_typ_) {
        for (int d = 0; d < depth; ++d) {
          const int u = order_[d];
          const int cell = pair_->adj1.at(a, assigned_[u]) * ell_ + pair_->adj2.at(v, u);
          ++increments;
          if (++counts_[cell] > cap_[cell]) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        assigned_[v] = a;
        label_used_[a] = 1;
        bool wipeout = false;
        for (int w : label_vertices_[a]) {
          if (assigned_[w] < 0 && --domain_left_[w] == 0) wipeout = true;
        }
        const bool keep_going = wipeout || descend(depth + 1, out);
        for (int w : label_vertices_[a]) {
          if (assigned_[w] < 0) ++domain_left_[w];
        }
        label_used_[a] = 0;
        assigned_[v] = -1;
        if (!keep_going) {
          undo_increments(v, a, increments);
          return false;
        }
      }
      undo_increments(v, a, increments);
    }
    return true;
  }

  void undo_increments(int v, int a, int increments) {
    for (int d = 0; d < increments; ++d) {
      const int u = order_[d];
      --counts_[pair_->adj1.at(a, assigned_[u]) * ell_ + pair_->adj2.at(v, u)];
    }
  }

  bool final_type_ok() const {
    if (ut_length(n_) == 0) return true;  // n=1: no pairs to test
    const double N = static_cast<double>(ut_length(n_));
    for (std::size_t c = 0; c < counts_.size(); ++c) {
      const double p = target_[c];
      if (p == 0.0) {
        if (counts_[c] != 0) return false;
      } else if (std::fabs(static_cast<double>(counts_[c]) / N - p) > epsilon_ + 1e-12) {
        return false;
      }
    }
    return true;
  }

  const AmbiguityMatrix& B_;
  int n_;
  SearchBudget budget_;
  std::vector<int> order_;
  std::vector<int> assigned_;
  std::vector<std::uint8_t> label_used_;
  std::vector<int> domain_left_;
  std::vector<std::vector<int>> label_vertices_;
  std::uint64_t nodes_ = 0;
  bool truncated_ = false;
  RngStream* rng_ = nullptr;
  std::vector<int>* selected_out_ = nullptr;

  bool use_typ_ = false;
  const GraphPair* pair_ = nullptr;
  int ell_ = 0;
  double epsilon_ = 0.0;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> cap_;
  std::vector<double> target_;
};

}  // namespace

CandidateSet enumerate_consistent(const AmbiguityMatrix& B, const SearchBudget& budget) {
  Search s(B, budget);
  return s.run(nullptr, nullptr);
}

MatchResult tm_match(const GraphPair& pair, const AmbiguityMatrix& B,
                     const TypicalityParams& params, RngStream& rng, const SearchBudget& budget) {
  if (pair.n != B.n()) fail(Errc::dimension_mismatch, "tm_match: pair and B sizes differ");
  Search s(B, budget);
  s.enable_typicality(pair, params.epsilon);
  std::vector<int> selected;
  CandidateSet set = s.run(&rng, &selected);
  MatchResult r;
  r.candidate_count = set.total_count;
  r.truncated = set.truncated;
  r.nodes_explored = set.nodes_explored;
  if (set.total_count > 0) {
    r.chosen = Labeling(selected);
    r.accuracy = accuracy(*r.chosen, pair.truth);
  }
  r.candidates = std::move(set);
  return r;
}

}  // namespace tmatch
