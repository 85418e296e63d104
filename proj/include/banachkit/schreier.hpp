#pragma once

#include <functional>
#include <vector>

#include "banachkit/fvec.hpp"
#include "banachkit/space_handle.hpp"

namespace banachkit {

// A finite family of nonempty, pairwise disjoint admissible sets.
struct SchreierPartition {
    std::vector<IndexSet> sets;
};

struct SbResult {
    double value = 0.0;
    SchreierPartition partition;
    bool exact = true;  // false when the search was heuristic
};

enum class SbMode { exact, heuristic };

// Admissibility: F is empty or min F >= |F|.
bool is_schreier(const IndexSet& F);

// Enumerates every partition of `support` into admissible sets, each exactly
// once up to ordering of the sets. Throws SizeError above the cap.
void for_each_admissible_partition(const IndexSet& support,
                                   const std::function<void(const SchreierPartition&)>& visit,
                                   int cap = 12);
std::vector<SchreierPartition> admissible_partitions(const IndexSet& support, int cap = 12);

// (sum_j ||F_j x||_X^r)^(1/r) recomputed from an explicit family, with the
// addends accumulated in decreasing order. Both search routines report this
// canonical value of their argmax family, so exact-mode results are
// reproducible bit for bit.
double partition_value(const FVec& x, const NormHandle& X, double r,
                       const std::vector<IndexSet>& sets);

// Norm of the Schreier-Baernstein space over base X: supremum of the
// lr-aggregate of base norms of restrictions over pairwise disjoint
// admissible families. For a monotone 1-unconditional base norm the search
// over partitions of the support suffices: restricting a family to the
// support keeps it admissible, and uncovered coordinates join as singletons
// without decreasing the aggregate. Exact mode runs a memoized
// branch-and-bound over partitions (cap on |supp x|); heuristic mode returns
// a certified lower bound flagged exact = false.
SbResult sb_norm(const FVec& x, const NormHandle& X, double r, SbMode mode = SbMode::exact,
                 int exhaustive_cap = 12);

// Independent validation oracle: plain recursive enumeration, no memo, no
// pruning. For |supp x| <= 6 it maximizes over *all* disjoint admissible
// families (partitions of every subset of the support), checking the
// partition reduction itself; for supports up to 8 it enumerates partitions.
double sb_norm_oracle(const FVec& x, const NormHandle& X, double r);

}  // namespace banachkit
