#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace banachkit {

using Index = std::int64_t;
// Sorted, duplicate-free set of 1-based indices.
using IndexSet = std::vector<Index>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Finitely supported real vector with 1-based indices. Stored entries are
// nonzero and finite; everything else is an implicit zero.
//
// A vector that is constant on an index interval may be kept in a compact
// flat form instead of materialized entries, so norm computations with
// closed forms can run on supports of length 10^6 without allocating them.
// Flat vectors materialize transparently (below a cap) when an operation
// needs individual entries.
class FVec {
public:
    struct Flat {
        double value;  // nonzero
        Index from;    // >= 1
        Index to;      // >= from
    };

    FVec() = default;

    // Entries are validated (finite, nonzero values; indices >= 1; no
    // duplicates) and stored sorted by index.
    static FVec from_pairs(std::vector<std::pair<Index, double>> entries);
    // Position i (0-based) becomes index i+1; zeros are dropped.
    static FVec from_dense(const std::vector<double>& values);
    static FVec flat(double value, Index from, Index to);
    static FVec unit(Index i, double coeff = 1.0);

    bool empty() const;
    bool is_flat() const { return flat_.has_value(); }
    const std::optional<Flat>& flat_desc() const { return flat_; }

    std::int64_t support_size() const;
    IndexSet support() const;
    Index min_index() const;  // 0 when empty
    Index max_index() const;  // 0 when empty
    double at(Index i) const;
    double max_abs() const;  // 0 for the empty vector
    double min_abs() const;  // smallest |entry|, +inf for the empty vector

    // Materialized entries sorted by index. Throws SizeError for flat
    // vectors longer than the materialization cap.
    const std::vector<std::pair<Index, double>>& entries() const;

    FVec scaled(double c) const;
    friend FVec operator+(const FVec& a, const FVec& b);
    friend FVec operator-(const FVec& a, const FVec& b);
    bool operator==(const FVec& other) const;

    // Stable content hash used by evaluation caches.
    std::uint64_t hash() const;

    static constexpr Index materialize_cap = 1 << 20;

private:
    void materialize() const;

    mutable std::vector<std::pair<Index, double>> entries_;
    mutable std::optional<Flat> flat_;
};

// (sum_i |x_i|^p)^(1/p); max |x_i| for p = inf. The power sum is accumulated
// in decreasing-magnitude order so the value is exactly invariant under
// permutations of the support.
double lp_norm(const FVec& x, double p);

// Coordinate restriction of x to the index set F.
FVec restrict_to(const FVec& x, const IndexSet& F);

// Absolute values of the nonzero entries of x, sorted non-increasing and
// re-indexed to {1..d}. Ties keep original index order.
FVec rearrange_dec(const FVec& x);

// Splits x into (big, small): big keeps entries with |x_i| >= delta, small
// keeps the rest. Pure selection, so big + small == x exactly.
std::pair<FVec, FVec> threshold_split(const FVec& x, double delta);

// JSON vector literals: dense array `[1, 0, 2]`, sparse object
// `{"2": 1.5, "7": -0.25}`, or flat `{"flat": {"value": v, "from": a, "to": b}}`.
FVec fvec_from_json_text(const std::string& text);
std::string fvec_to_json_text(const FVec& x);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace banachkit
