#pragma once

#include <optional>
#include <vector>

#include "banachkit/gauge.hpp"
#include "banachkit/space_handle.hpp"

namespace banachkit {

// The m-sequence of the diagonal construction: either a closed rule or an
// explicit strictly increasing list with m_1 >= 1.
struct DavisSchedule {
    enum class Kind { pow2, lin, explicit_list };
    Kind kind = Kind::pow2;
    std::vector<double> list;

    double m(int k) const;  // k is 1-based
    // infinity for rules, list length for explicit schedules
    int max_components() const;
    // sum_k 1/m_k < inf, required for certified eps-mode truncation
    bool summable_reciprocals() const;
    void validate() const;
};

struct DavisTruncation {
    enum class Mode { fixed_k, tail_eps };
    Mode mode = Mode::tail_eps;
    int fixed_k = 8;
    double eps = 1e-8;
};

struct DavisParams {
    double q = 1.5;
    double p = 2.0;  // component gauges need 1 < q < p
    DavisSchedule schedule;
    DavisTruncation truncation;
    // Component norm: the quadratic-mean gauge by default; the max variant
    // yields an equivalent space (within sqrt(2) componentwise).
    bool use_max_variant = false;
    // Divide by the computed norm of the first diagonal basis vector, making
    // the basis normalized. Off by default; the raw value is what the
    // construction defines.
    bool normalize = false;
    std::optional<double> j_norm_bound;  // recorded when known, never inferred
    GaugeOptions gauge_opts;

    void validate() const;
};

struct DavisValue {
    double value = 0.0;
    double tail_bound = 0.0;  // certified bound on the omitted components
    int k_used = 0;
    std::vector<double> components;  // the K aggregated gauge values
    double basis_norm = 1.0;         // computed only when normalize is set
};

// Norm of the diagonal element (x, x, ...) of the X-sum of gauge-normed
// copies: applies the outer norm to the sequence of component gauges
// g_k = gauge of x with index m_k, truncated after K components with a
// certified tail bound. The outer space must be monotone, 1-unconditional,
// with basis norms <= 1 (so the triangle-inequality tail bound applies).
DavisValue davis_norm(const FVec& x, const NormHandle& outer, const DavisParams& params);

// Certified upper bound on the norm contribution of components k > K:
// each gauge is at most ||x||_q / (m_k + 1/m_k) (times sqrt(2) for the
// quadratic-mean variant), and the outer norm of the omitted part is at most
// the sum of component gauges when basis norms are <= 1. Requires a
// summable schedule or an explicit list (zero tail beyond it).
double davis_tail_bound(const FVec& x, const DavisParams& params, int K);

// Coefficient identity from diagonal elements to the underlying lp basis.
FVec j_map(const FVec& x_diag);

// Observed ratio sup ||j(x)||_p / ||x||_D over the given sample; a measured
// constant, reported but never asserted.
double estimate_j_norm(const std::vector<FVec>& sample, const NormHandle& outer,
                       const DavisParams& params);

}  // namespace banachkit
