#pragma once

#include <functional>
#include <optional>

#include "banachkit/fvec.hpp"

namespace banachkit {

// Norm evaluation handle for a base space, with the structural facts the
// combinatorial norms rely on. Handles must be safe for concurrent calls.
struct NormHandle {
    std::function<double(const FVec&)> norm;
    bool unconditional = true;
    bool monotone = true;
    bool symmetric = false;
    // sup_k ||e_k|| <= 1 for the basis of the space; needed by certified
    // tail bounds and by the branch-and-bound envelope.
    bool basis_norm_le_one = true;
    // Exponent of a proved upper lp estimate (p-convexity implies one);
    // unset disables pruning that would rely on it.
    std::optional<double> upper_estimate_p;
    std::optional<double> lower_estimate_q;
};

NormHandle lp_handle(double p);

}  // namespace banachkit
