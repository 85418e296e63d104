#include "banachkit/schreier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "banachkit/errors.hpp"

namespace banachkit {

NormHandle lp_handle(double p) {
    NormHandle h;
    h.norm = [p](const FVec& x) { return lp_norm(x, p); };
    h.unconditional = true;
    h.monotone = true;
    h.symmetric = true;
    h.basis_norm_le_one = true;
    h.upper_estimate_p = p;
    h.lower_estimate_q = p;
    return h;
}

bool is_schreier(const IndexSet& F) {
    if (F.empty()) return true;
    Index mn = *std::min_element(F.begin(), F.end());
    return mn >= static_cast<Index>(F.size());
}

namespace {

using Mask = std::uint32_t;

IndexSet mask_to_set(Mask f, const IndexSet& supp) {
    IndexSet out;
    for (Mask rest = f; rest; rest &= rest - 1)
        out.push_back(supp[static_cast<std::size_t>(std::countr_zero(rest))]);
    return out;
}

// Visits every admissible block containing the lowest set position of `rem`.
// Admissibility only constrains the block size against the smallest index
// value, since min F is that index for any F built this way.
template <typename Fn>
void for_each_lead_block(Mask rem, const IndexSet& supp, Fn&& fn) {
    const int lead = std::countr_zero(rem);
    const Mask rest = rem & (rem - 1) & ~((Mask{1} << lead) - 1);
    const Index max_size = supp[static_cast<std::size_t>(lead)];
    // submask enumeration over the positions above `lead`
    Mask sub = rest;
    while (true) {
        Mask block = sub | (Mask{1} << lead);
        if (static_cast<Index>(std::popcount(block)) <= max_size) fn(block);
        if (sub == 0) break;
        sub = (sub - 1) & rest;
    }
}

void enumerate_partitions(Mask rem, const IndexSet& supp, std::vector<Mask>& acc,
                          const std::function<void(const SchreierPartition&)>& visit) {
    if (rem == 0) {
        SchreierPartition part;
        part.sets.reserve(acc.size());
        for (Mask f : acc) part.sets.push_back(mask_to_set(f, supp));
        visit(part);
        return;
    }
    for_each_lead_block(rem, supp, [&](Mask block) {
        acc.push_back(block);
        enumerate_partitions(rem & ~block, supp, acc, visit);
        acc.pop_back();
    });
}

double pow_r(double v, double r) { return r == 2.0 ? v * v : std::pow(v, r); }

}  // namespace

void for_each_admissible_partition(const IndexSet& support,
                                   const std::function<void(const SchreierPartition&)>& visit,
                                   int cap) {
    if (static_cast<int>(support.size()) > cap)
        throw SizeError("admissible_partitions: support of size " + std::to_string(support.size()) +
                        " exceeds the exhaustive cap " + std::to_string(cap));
    IndexSet supp = support;
    std::sort(supp.begin(), supp.end());
    if (supp.empty()) {
        visit(SchreierPartition{});
        return;
    }
    std::vector<Mask> acc;
    enumerate_partitions((Mask{1} << supp.size()) - 1, supp, acc, visit);
}

std::vector<SchreierPartition> admissible_partitions(const IndexSet& support, int cap) {
    std::vector<SchreierPartition> out;
    for_each_admissible_partition(support, [&](const SchreierPartition& p) { out.push_back(p); },
                                  cap);
    return out;
}

double partition_value(const FVec& x, const NormHandle& X, double r,
                       const std::vector<IndexSet>& sets) {
    std::vector<double> vals;
    vals.reserve(sets.size());
    for (const auto& F : sets) {
        IndexSet sorted = F;
        std::sort(sorted.begin(), sorted.end());
        vals.push_back(X.norm(restrict_to(x, sorted)));
    }
    std::sort(vals.begin(), vals.end(), std::greater<>());
    double s = 0.0;
    for (double v : vals) s += pow_r(v, r);
    return std::pow(s, 1.0 / r);
}

namespace {

struct ExactSearch {
    const FVec& x;
    const NormHandle& X;
    double r;
    IndexSet supp;
    std::map<Mask, double> block_pow;      // ||F x||^r per block mask
    std::map<Mask, std::pair<double, Mask>> memo;  // best aggregate + lead block
    std::vector<double> env_term;          // per-position prune envelope term
    bool can_prune = false;

    double block_power(Mask f) {
        auto it = block_pow.find(f);
        if (it != block_pow.end()) return it->second;
        double v = pow_r(X.norm(restrict_to(x, mask_to_set(f, supp))), r);
        block_pow.emplace(f, v);
        return v;
    }

    // Upper envelope for the best aggregate on `rem`, from the base norm's
    // upper lp estimate: sum_j ||F_j x||^r <= (sum_i |x_i|^s)^(r/s) for
    // s = upper_estimate_p <= r and basis norms <= 1.
    double envelope(Mask rem) const {
        double s = 0.0;
        for (Mask rest = rem; rest; rest &= rest - 1)
            s += env_term[static_cast<std::size_t>(std::countr_zero(rest))];
        return std::pow(s, r / *X.upper_estimate_p);
    }

    double best_power(Mask rem) {
        if (rem == 0) return 0.0;
        auto it = memo.find(rem);
        if (it != memo.end()) return it->second.first;
        double best = -1.0;
        Mask best_block = 0;
        for_each_lead_block(rem, supp, [&](Mask block) {
            if (can_prune && best >= 0.0) {
                // remainder bound: this block plus the envelope of the rest
                if (block_power(block) + envelope(rem & ~block) <= best) return;
            }
            double v = block_power(block) + best_power(rem & ~block);
            if (v > best) { best = v; best_block = block; }
        });
        memo.emplace(rem, std::make_pair(best, best_block));
        return best;
    }

    std::vector<IndexSet> extract(Mask rem) {
        std::vector<IndexSet> sets;
        while (rem != 0) {
            best_power(rem);
            Mask block = memo.at(rem).second;
            sets.push_back(mask_to_set(block, supp));
            rem &= ~block;
        }
        return sets;
    }
};

}  // namespace

SbResult sb_norm(const FVec& x, const NormHandle& X, double r, SbMode mode, int exhaustive_cap) {
    if (!(r >= 1.0)) throw std::invalid_argument("sb_norm: need r >= 1");
    if (!X.unconditional || !X.monotone)
        throw std::invalid_argument("sb_norm: base norm must be 1-unconditional and monotone");
    SbResult res;
    if (x.empty()) return res;
    IndexSet supp = x.support();

    if (mode == SbMode::exact) {
        if (static_cast<int>(supp.size()) > exhaustive_cap)
            throw SizeError("sb_norm: support of size " + std::to_string(supp.size()) +
                            " exceeds the exhaustive cap " + std::to_string(exhaustive_cap) +
                            "; use heuristic mode");
        ExactSearch search{x, X, r, supp, {}, {}, {}, false};
        if (X.upper_estimate_p && *X.upper_estimate_p <= r && X.basis_norm_le_one) {
            search.can_prune = true;
            search.env_term.reserve(supp.size());
            for (Index i : supp)
                search.env_term.push_back(std::pow(std::abs(x.at(i)), *X.upper_estimate_p));
        }
        Mask all = (Mask{1} << supp.size()) - 1;
        search.best_power(all);
        res.partition.sets = search.extract(all);
        res.value = partition_value(x, X, r, res.partition.sets);
        res.exact = true;
        return res;
    }

    // Heuristic: all singletons, then greedy merges while the canonical
    // aggregate improves and blocks stay admissible. Always a valid family,
    // so the value is a certified lower bound.
    std::vector<IndexSet> sets;
    for (Index i : supp) sets.push_back({i});
    double current = partition_value(x, X, r, sets);
    bool improved = true;
    while (improved && sets.size() > 1) {
        improved = false;
        std::size_t bi = 0, bj = 0;
        double best = current;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            for (std::size_t j = i + 1; j < sets.size(); ++j) {
                IndexSet merged = sets[i];
                merged.insert(merged.end(), sets[j].begin(), sets[j].end());
                if (!is_schreier(merged)) continue;
                auto trial = sets;
                trial[i] = merged;
                trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(j));
                double v = partition_value(x, X, r, trial);
                if (v > best) { best = v; bi = i; bj = j; improved = true; }
            }
        }
        if (improved) {
            sets[bi].insert(sets[bi].end(), sets[bj].begin(), sets[bj].end());
            std::sort(sets[bi].begin(), sets[bi].end());
            sets.erase(sets.begin() + static_cast<std::ptrdiff_t>(bj));
            current = best;
        }
    }
    res.partition.sets = sets;
    res.value = current;
    res.exact = false;
    return res;
}

namespace {

// Plain enumeration used by the oracle: recurse position by position; each
// position either starts or joins a block, or (when allowed) stays
// uncovered. Completely independent of the memoized search above.
void oracle_rec(std::size_t pos, const IndexSet& supp, std::vector<IndexSet>& blocks,
                bool allow_uncovered, const FVec& x, const NormHandle& X, double r, double& best,
                std::vector<IndexSet>& best_sets) {
    if (pos == supp.size()) {
        double v = partition_value(x, X, r, blocks);
        if (v > best) { best = v; best_sets = blocks; }
        return;
    }
    Index idx = supp[pos];
    if (allow_uncovered)
        oracle_rec(pos + 1, supp, blocks, allow_uncovered, x, X, r, best, best_sets);
    for (auto& b : blocks) {
        b.push_back(idx);
        if (is_schreier(b))
            oracle_rec(pos + 1, supp, blocks, allow_uncovered, x, X, r, best, best_sets);
        b.pop_back();
    }
    blocks.push_back({idx});
    oracle_rec(pos + 1, supp, blocks, allow_uncovered, x, X, r, best, best_sets);
    blocks.pop_back();
}

}  // namespace

double sb_norm_oracle(const FVec& x, const NormHandle& X, double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("sb_norm_oracle: need r >= 1");
    if (x.empty()) return 0.0;
    IndexSet supp = x.support();
    if (supp.size() > 8)
        throw SizeError("sb_norm_oracle: support of size " + std::to_string(supp.size()) +
                        " exceeds the oracle cap 8");
    std::vector<IndexSet> blocks, best_sets;
    double best = 0.0;
    oracle_rec(0, supp, blocks, supp.size() <= 6, x, X, r, best, best_sets);
    return partition_value(x, X, r, best_sets);
}

}  // namespace banachkit
