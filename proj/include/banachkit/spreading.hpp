#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "banachkit/fvec.hpp"
#include "banachkit/space_expr.hpp"

namespace banachkit {

using ShiftTuple = std::vector<Index>;

// Pure index -> vector source living in a declared space. Block supports
// strictly increase with n for the block kind; the shifted kind yields
// x_1 + x_{n+1} of its inner generator.
class SequenceGenerator {
public:
    enum class Kind { basis, block, constant, shifted, custom };

    static SequenceGenerator basis(SpaceExpr space);
    // x_n carries the profile on the window of width |profile| starting at
    // start + (n-1) * (|profile| + gap).
    static SequenceGenerator block(SpaceExpr space, std::vector<double> profile, Index gap = 0,
                                   Index start = 1);
    static SequenceGenerator constant(SpaceExpr space, FVec x);
    static SequenceGenerator shifted(SequenceGenerator inner);
    static SequenceGenerator custom(SpaceExpr space, std::vector<FVec> vectors);

    FVec at(int n) const;  // 1-based
    Kind kind() const { return kind_; }
    const SpaceExpr& space() const { return *space_; }

    nlohmann::json to_json() const;
    static SequenceGenerator from_json(const nlohmann::json& j);

private:
    SequenceGenerator() = default;
    Kind kind_ = Kind::basis;
    std::shared_ptr<const SpaceExpr> space_;
    std::vector<double> profile_;
    Index gap_ = 0;
    Index start_ = 1;
    FVec constant_;
    std::shared_ptr<const SequenceGenerator> inner_;
    std::vector<FVec> custom_;
};

// x_1 + x_{n+1}: the shift construction that turns a singular spreading
// sequence's unconditional part back into the original.
SequenceGenerator singular_shift(const SequenceGenerator& gen);

// Finite-section estimate of the limiting norm of sum_i a_i x_{k_i} over a
// grid of admissible shift tuples (strictly increasing, min >= n).
struct SmEstimate {
    std::vector<double> coeffs;
    std::vector<ShiftTuple> shifts;
    std::vector<double> values;
    std::vector<double> delta_schedule;  // successive |value| differences
    bool stabilized = false;  // last three grid values pairwise within tol
    double value = 0.0;       // last grid value
};

SmEstimate sm_estimate(const SequenceGenerator& gen, const std::vector<double>& coeffs,
                       const std::vector<ShiftTuple>& shifts, double tol, Evaluator& eval);

// Shift tuples (b, b+1, ..., b+n-1) for b = k0, 2*k0, 4*k0, ...; geometric
// probing exposes slow drift that equally spaced grids can miss.
std::vector<ShiftTuple> geometric_shift_grid(int n, Index k0, int count);

// Exact spreading-model value of the basis of an SB node whose base space
// has a spreading basis and a lower lq estimate with q <= r: far-out
// sections are supported on admissible sets, where the SB norm collapses to
// the base norm.
double sm_exact_schreier(const SpaceExpr& sb_expr, const std::vector<double>& coeffs,
                         Evaluator& eval);

// Decreasing coefficient profile of a block sequence plus the diagnostics
// gathered while extracting it.
struct Profile {
    std::vector<double> lambda;         // non-increasing, nonnegative
    std::vector<double> residual_sup;   // ||z_n||_inf per n
    struct DeltaCount {
        double delta;
        int count;    // #{i : rearranged x_n(i) >= delta} at the horizon
        bool stable;  // constant over the tail window
    };
    std::vector<DeltaCount> m_delta_table;
    bool truncated = false;  // entries below the final threshold were cut
};

struct Decomposition {
    enum class Status { ok, inconclusive };
    Status status = Status::ok;
    std::string note;
    Profile profile;
    std::vector<FVec> y;  // per-n big parts; y[n] + z[n] == x_{n+1} exactly
    std::vector<FVec> z;
};

// Follows the threshold decomposition: rearrange each x_n, estimate the
// coordinatewise limit profile over the tail of the horizon, and split each
// x_n at its schedule threshold. Limits are never claimed: an unstable
// profile is reported as inconclusive.
Decomposition decompose(const SequenceGenerator& gen, const std::vector<double>& delta_schedule,
                        int horizon, double cauchy_tol = 1e-7);

// Norm of sum_k a_k u_k where u_k are disjoint copies of the profile. Only
// symmetric spaces qualify (the value must not depend on the placement).
double profile_norm(const std::vector<double>& lambda, const std::vector<double>& coeffs,
                    const SpaceExpr& space, Evaluator& eval);
// Test hook: same value with explicit disjoint placements N_k(i).
double profile_norm_at(const std::vector<double>& lambda, const std::vector<double>& coeffs,
                       const std::vector<IndexSet>& placements, const SpaceExpr& space,
                       Evaluator& eval);

struct CesaroPoint {
    int n;
    double value;  // norm of the average of x_1..x_n
};
// Descriptive trend of Cesaro means; no limit is asserted.
std::vector<CesaroPoint> cesaro_diagnostic(const SequenceGenerator& gen, int horizon,
                                           Evaluator& eval);

// Two-sided finite-section equivalence constants between the spreading
// sequences induced by two profiles: min and max of the ratio
// profile_norm_A / profile_norm_B over the sample, zero-norm coefficient
// vectors excluded.
std::pair<double, double> equiv_constants(const std::vector<double>& lambda_a,
                                          const std::vector<double>& lambda_b,
                                          const SpaceExpr& space_a, const SpaceExpr& space_b,
                                          const std::vector<std::vector<double>>& samples,
                                          Evaluator& eval);

}  // namespace banachkit
