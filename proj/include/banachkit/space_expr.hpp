#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "banachkit/davis.hpp"
#include "banachkit/fvec.hpp"
#include "banachkit/schreier.hpp"
#include "banachkit/space_handle.hpp"

namespace banachkit {

// Expression tree for composed sequence spaces.
//
//   expr  := lp | sb | davis
//   lp    := "lp(" REAL ")"
//   sb    := "sb(" expr "," "r=" REAL ")"
//   davis := "davis(" expr "," "q=" REAL "," "p=" REAL "," "m=" sched ("," trunc)? ")"
//   sched := "pow2" | "lin" | "[" REAL ("," REAL)* "]"
//   trunc := "K=" INT | "eps=" REAL
//
// Unknown keys are rejected; a davis node without a trunc clause defaults to
// eps-mode with eps = 1e-8.
class SpaceExpr {
public:
    enum class Kind { lp, sb, davis };

    Kind kind = Kind::lp;
    double lp_p = 2.0;          // lp
    double sb_r = 1.0;          // sb
    DavisParams davis;          // davis
    std::shared_ptr<const SpaceExpr> child;  // sb and davis
    std::string source;         // text this node was parsed from, if any

    static SpaceExpr make_lp(double p);
    static SpaceExpr make_sb(SpaceExpr child, double r);
    static SpaceExpr make_davis(SpaceExpr child, DavisParams params);

    bool structurally_equal(const SpaceExpr& other) const;
};

// Structural parameters tracked per node. Only facts with a derivation are
// filled in; a Davis node keeps its convexity unknown.
struct SpaceMeta {
    std::optional<double> p_convex;
    std::optional<double> lower_estimate_r;
    bool symmetric = false;
    bool spreading_basis = false;
    std::optional<double> saturated_r;  // informational
    bool basis_norm_le_one = true;
    bool monotone = true;
    bool unconditional = true;
};

SpaceExpr parse_space(const std::string& text);
std::string format_space(const SpaceExpr& expr);
SpaceMeta meta_of(const SpaceExpr& expr);

struct NormResult {
    double value = 0.0;
    nlohmann::json certificate;
};

struct EvalOptions {
    int sb_exhaustive_cap = 12;
    bool sb_heuristic_fallback = false;  // past the cap: heuristic instead of error
    GaugeOptions gauge_opts;
    bool cache = true;
};

// Recursive norm evaluation with a value cache keyed by canonical node text
// and vector content. Cached values are shared across concurrent readers;
// writes are exclusive. Identical (expr, x) queries always return identical
// values.
class Evaluator {
public:
    explicit Evaluator(EvalOptions opts = {});

    double norm_value(const SpaceExpr& expr, const FVec& x);
    NormResult norm_of(const SpaceExpr& expr, const FVec& x);
    NormHandle handle_for(const SpaceExpr& expr);

    // Optional persistent cache (BANACHKIT_CACHE_DIR): load merges an
    // existing file, flush writes the current map back.
    void load_cache_dir(const std::string& dir);
    void flush_cache_dir(const std::string& dir) const;

    const EvalOptions& options() const { return opts_; }

private:
    double eval(const SpaceExpr& expr, const FVec& x, const std::string& path);
    nlohmann::json certify(const SpaceExpr& expr, const FVec& x, const std::string& path);

    EvalOptions opts_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, double> cache_;
};

// One level of the iterated construction: X_{k+1} is the symmetric-basis
// space built (via the diagonal construction with gauge indices s, t) over
// the Schreier-Baernstein space SB(X_k, r).
struct ChainLevel {
    int k = 0;
    double r = 0.0;
    double s = 0.0;
    double t = 0.0;
    std::string schedule = "pow2";
    int truncation_k = 8;
    double q_proxy_in = 0.0;  // lower-estimate proxy of the previous level
    double p_proxy_in = 0.0;  // configured convexity proxy of the previous level
    std::string expr_text;
};

struct ChainDescriptor {
    double p0 = 0.0;
    double q0 = 0.0;
    std::vector<ChainLevel> levels;
    nlohmann::json to_json() const;
    const std::string& top_expr_text() const { return levels.back().expr_text; }
};

struct ChainPolicy {
    double r_step = 1.0;       // r_{k+1} = max(r_k, q_k proxy) + r_step
    double s_frac = 1.0 / 3.0; // s_{k+1} = 1 + s_frac * (p_k proxy - 1)
    double t_frac = 2.0 / 3.0; // t_{k+1} = 1 + t_frac * (p_k proxy - 1)
    int truncation_k = 8;
    std::string schedule = "pow2";
};

// Builds the level descriptors for X_1..X_k over the base lp(p0). The
// convexity/concavity exponents of the renormed intermediate spaces are not
// computable, so the builder tracks declared proxies: the lower-estimate
// parameter r_k stands in for q_k, and the gauge index s_k stands in for
// p_k. Every proxy is recorded in the descriptor.
ChainDescriptor build_chain(double p0, double q0, int k, const ChainPolicy& policy = {});

}  // namespace banachkit
