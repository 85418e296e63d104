#pragma once

#include "banachkit/fvec.hpp"

namespace banachkit {

// Parameters of the interpolation gauges. The index m is a real >= 1; the
// constructions that motivate these norms use integer m but nothing in the
// solver needs that.
struct GaugeParams {
    double q = 1.0;
    double p = 2.0;
    double m = 1.0;
    void validate() const;  // 1 <= q < p < inf, m >= 1
};

enum class GaugeVariant {
    gauge,   // inf of max(||y||_q, ||z||_p) over x = m*y + (1/m)*z
    gauge2,  // inf of (||y||_q^2 + ||z||_p^2)^(1/2) over the same decompositions
};

struct GaugeResult {
    double value = 0.0;
    FVec y;  // witnessing decomposition: x = m*y + (1/m)*z
    FVec z;
    GaugeVariant variant = GaugeVariant::gauge;
    // Width of the final solver bracket (0 for closed-form paths); the true
    // infimum lies within this slack of `value`.
    double residual_certificate = 0.0;
};

struct GaugeOptions {
    double tol = 1e-8;      // relative accuracy of `value`
    int max_bisect = 200;   // cap for each bisection loop
    int max_newton = 100;   // cap for each scalar Newton solve
    bool force_generic = false;  // bypass the flat closed form (cross-checks)
};

// Minkowski gauge of m*B_q + (1/m)*B_p: equals the infimum over
// decompositions x = m*y + (1/m)*z of max(||y||_q, ||z||_p). Outer bisection
// on the balance level t = ||y||_q; the inner projection is solved
// coordinatewise (see inner_projection).
GaugeResult gauge_qpm(const FVec& x, const GaugeParams& params, const GaugeOptions& opts = {});

// Quadratic-mean variant: infimum of (||y||_q^2 + ||z||_p^2)^(1/2). Golden
// section on the balance level; everything else is shared with gauge_qpm.
GaugeResult gauge2_qpm(const FVec& x, const GaugeParams& params, const GaugeOptions& opts = {});

// Solves min ||x - m*y||_p subject to ||y||_q <= t. The optimum is
// sign-aligned with x and coordinatewise dominated (|m*y_i| <= |x_i|). KKT:
// bisection on the multiplier enforcing ||y||_q = t, per-coordinate
// safeguarded Newton on the stationarity equation; q = 1 takes the
// water-filling closed form per coordinate.
FVec inner_projection(const FVec& x, double t, const GaugeParams& params,
                      const GaugeOptions& opts = {});

// Closed-form gauge of the flat vector 1_N. Both unit balls are invariant
// under permutations and sign flips of coordinates, so averaging any
// decomposition of 1_N over that symmetry group is again a decomposition and
// (by convexity of both norms) does not increase the objective; hence a flat
// decomposition y = a*1_N, z = b*1_N is optimal. Balancing the two norms
// gives, for the max variant,
//     value = (m*N^(-1/q) + m^(-1)*N^(-1/p))^(-1)
// and minimizing the quadratic mean over m*a + b/m = 1 gives
//     value = (m^2*N^(-2/q) + m^(-2)*N^(-2/p))^(-1/2).
double flat_gauge_oracle(Index n, const GaugeParams& params, GaugeVariant variant);

}  // namespace banachkit
