#include "banachkit/space_expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "banachkit/errors.hpp"

namespace banachkit {

SpaceExpr SpaceExpr::make_lp(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp node: need 1 <= p < inf");
    SpaceExpr e;
    e.kind = Kind::lp;
    e.lp_p = p;
    return e;
}

SpaceExpr SpaceExpr::make_sb(SpaceExpr child, double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("sb node: need 1 <= r < inf");
    SpaceExpr e;
    e.kind = Kind::sb;
    e.sb_r = r;
    e.child = std::make_shared<SpaceExpr>(std::move(child));
    return e;
}

SpaceExpr SpaceExpr::make_davis(SpaceExpr child, DavisParams params) {
    params.validate();
    SpaceExpr e;
    e.kind = Kind::davis;
    e.davis = std::move(params);
    e.child = std::make_shared<SpaceExpr>(std::move(child));
    return e;
}

bool SpaceExpr::structurally_equal(const SpaceExpr& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::lp: return lp_p == other.lp_p;
        case Kind::sb: return sb_r == other.sb_r && child->structurally_equal(*other.child);
        case Kind::davis: {
            const auto& a = davis;
            const auto& b = other.davis;
            if (a.q != b.q || a.p != b.p || a.use_max_variant != b.use_max_variant ||
                a.normalize != b.normalize)
                return false;
            if (a.schedule.kind != b.schedule.kind || a.schedule.list != b.schedule.list)
                return false;
            if (a.truncation.mode != b.truncation.mode) return false;
            if (a.truncation.mode == DavisTruncation::Mode::fixed_k) {
                if (a.truncation.fixed_k != b.truncation.fixed_k) return false;
            } else if (a.truncation.eps != b.truncation.eps) {
                return false;
            }
            return child->structurally_equal(*other.child);
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    SpaceExpr parse() {
        SpaceExpr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input", "end of input");
        e.source = text_;
        return e;
    }

private:
    SpaceExpr expr() {
        skip_ws();
        const std::size_t start = pos_;
        std::string name = ident();
        if (name == "lp") {
            expect('(');
            double p = real();
            expect(')');
            SpaceExpr e = node([&] { return SpaceExpr::make_lp(p); }, start);
            return e;
        }
        if (name == "sb") {
            expect('(');
            SpaceExpr child = expr();
            expect(',');
            key("r");
            double r = real();
            expect(')');
            return node([&] { return SpaceExpr::make_sb(std::move(child), r); }, start);
        }
        if (name == "davis") {
            expect('(');
            SpaceExpr child = expr();
            expect(',');
            key("q");
            DavisParams prm;
            prm.q = real();
            expect(',');
            key("p");
            prm.p = real();
            expect(',');
            key("m");
            prm.schedule = schedule();
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                prm.truncation = truncation();
            } else {
                prm.truncation = DavisTruncation{DavisTruncation::Mode::tail_eps, 8, 1e-8};
            }
            expect(')');
            return node([&] { return SpaceExpr::make_davis(std::move(child), std::move(prm)); },
                        start);
        }
        fail("unknown space constructor '" + name + "'", "lp, sb, or davis");
    }

    template <typename Make>
    SpaceExpr node(Make&& make, std::size_t start) {
        try {
            return make();
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("invalid parameters: ") + e.what(), start);
        }
    }

    DavisSchedule schedule() {
        skip_ws();
        DavisSchedule s;
        if (peek() == '[') {
            ++pos_;
            s.kind = DavisSchedule::Kind::explicit_list;
            s.list.push_back(real());
            skip_ws();
            while (peek() == ',') {
                ++pos_;
                s.list.push_back(real());
                skip_ws();
            }
            expect(']');
            return s;
        }
        std::string name = ident();
        if (name == "pow2") s.kind = DavisSchedule::Kind::pow2;
        else if (name == "lin") s.kind = DavisSchedule::Kind::lin;
        else fail("unknown schedule '" + name + "'", "pow2, lin, or [m1, m2, ...]");
        return s;
    }

    DavisTruncation truncation() {
        skip_ws();
        const std::size_t start = pos_;
        std::string name = ident();
        expect('=');
        DavisTruncation t;
        if (name == "K") {
            t.mode = DavisTruncation::Mode::fixed_k;
            double v = real();
            if (v < 1.0 || v != std::floor(v)) throw ParseError("K must be a positive integer", start);
            t.fixed_k = static_cast<int>(v);
        } else if (name == "eps") {
            t.mode = DavisTruncation::Mode::tail_eps;
            t.eps = real();
        } else {
            throw ParseError("unknown truncation key '" + name + "'", start, "K or eps");
        }
        return t;
    }

    void key(const std::string& expected) {
        skip_ws();
        const std::size_t start = pos_;
        std::string name = ident();
        if (name != expected) throw ParseError("unknown key '" + name + "'", start, expected + "=");
        expect('=');
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected an identifier", "identifier");
        return text_.substr(start, pos_ - start);
    }

    double real() {
        skip_ws();
        const std::size_t start = pos_;
        double v = 0.0;
        auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (res.ec != std::errc{}) fail("expected a number", "number");
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        if (!std::isfinite(v)) throw ParseError("number out of range", start);
        return v;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            fail(std::string("expected '") + c + "'", std::string(1, c));
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg, const std::string& expected) const {
        throw ParseError(msg, pos_, expected);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

SpaceExpr parse_space(const std::string& text) { return Parser(text).parse(); }

std::string format_space(const SpaceExpr& expr) {
    switch (expr.kind) {
        case SpaceExpr::Kind::lp:
            return "lp(" + format_double(expr.lp_p) + ")";
        case SpaceExpr::Kind::sb:
            return "sb(" + format_space(*expr.child) + ", r=" + format_double(expr.sb_r) + ")";
        case SpaceExpr::Kind::davis: {
            const auto& d = expr.davis;
            std::string sched;
            switch (d.schedule.kind) {
                case DavisSchedule::Kind::pow2: sched = "pow2"; break;
                case DavisSchedule::Kind::lin: sched = "lin"; break;
                case DavisSchedule::Kind::explicit_list: {
                    sched = "[";
                    for (std::size_t i = 0; i < d.schedule.list.size(); ++i) {
                        if (i) sched += ", ";
                        sched += format_double(d.schedule.list[i]);
                    }
                    sched += "]";
                    break;
                }
            }
            std::string trunc = d.truncation.mode == DavisTruncation::Mode::fixed_k
                                    ? "K=" + std::to_string(d.truncation.fixed_k)
                                    : "eps=" + format_double(d.truncation.eps);
            return "davis(" + format_space(*expr.child) + ", q=" + format_double(d.q) +
                   ", p=" + format_double(d.p) + ", m=" + sched + ", " + trunc + ")";
        }
    }
    return {};
}

SpaceMeta meta_of(const SpaceExpr& expr) {
    SpaceMeta meta;
    switch (expr.kind) {
        case SpaceExpr::Kind::lp:
            meta.p_convex = expr.lp_p;
            meta.lower_estimate_r = expr.lp_p;
            meta.symmetric = true;
            meta.spreading_basis = true;
            meta.saturated_r = expr.lp_p;
            meta.basis_norm_le_one = true;
            return meta;
        case SpaceExpr::Kind::sb: {
            SpaceMeta child = meta_of(*expr.child);
            meta.lower_estimate_r = expr.sb_r;
            if (child.p_convex && expr.sb_r >= *child.p_convex) meta.p_convex = child.p_convex;
            meta.symmetric = false;
            meta.spreading_basis = false;
            meta.saturated_r = expr.sb_r;
            meta.basis_norm_le_one = child.basis_norm_le_one;
            return meta;
        }
        case SpaceExpr::Kind::davis: {
            SpaceMeta child = meta_of(*expr.child);
            meta.symmetric = true;
            meta.spreading_basis = true;
            meta.saturated_r = child.saturated_r;
            if (expr.davis.normalize) {
                meta.basis_norm_le_one = true;
            } else {
                // sufficient triangle-inequality check: the diagonal basis
                // norm is at most the sum of unit-vector component gauges
                // over the components the truncation can ever aggregate
                int K = expr.davis.truncation.mode == DavisTruncation::Mode::fixed_k
                            ? expr.davis.truncation.fixed_k
                            : 64;
                K = std::min(K, expr.davis.schedule.max_components());
                double s = 0.0;
                for (int k = 1; k <= K; ++k)
                    s += flat_gauge_oracle(1, GaugeParams{expr.davis.q, expr.davis.p,
                                                          expr.davis.schedule.m(k)},
                                           expr.davis.use_max_variant ? GaugeVariant::gauge
                                                                      : GaugeVariant::gauge2);
                meta.basis_norm_le_one = child.basis_norm_le_one && s <= 1.0;
            }
            return meta;
        }
    }
    return meta;
}

// ---------------------------------------------------------------------------
// evaluation

Evaluator::Evaluator(EvalOptions opts) : opts_(std::move(opts)) {}

namespace {

std::string cache_key(const std::string& canon, const FVec& x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x.hash()));
    return canon + "|" + buf + ":" + std::to_string(x.support_size());
}

NormHandle handle_from_meta(const SpaceMeta& meta) {
    NormHandle h;
    h.unconditional = meta.unconditional;
    h.monotone = meta.monotone;
    h.symmetric = meta.symmetric;
    h.basis_norm_le_one = meta.basis_norm_le_one;
    h.upper_estimate_p = meta.p_convex;
    h.lower_estimate_q = meta.lower_estimate_r;
    return h;
}

}  // namespace

double Evaluator::eval(const SpaceExpr& expr, const FVec& x, const std::string& path) {
    if (expr.kind == SpaceExpr::Kind::lp) return lp_norm(x, expr.lp_p);

    const std::string canon = format_space(expr);
    std::string key;
    if (opts_.cache) {
        key = cache_key(canon, x);
        std::shared_lock lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    double value = 0.0;
    try {
        if (expr.kind == SpaceExpr::Kind::sb) {
            NormHandle base = handle_from_meta(meta_of(*expr.child));
            base.norm = [this, child = expr.child, path](const FVec& v) {
                return eval(*child, v, path + ".child");
            };
            if (opts_.sb_heuristic_fallback &&
                x.support_size() > opts_.sb_exhaustive_cap) {
                value = sb_norm(x, base, expr.sb_r, SbMode::heuristic).value;
            } else {
                value = sb_norm(x, base, expr.sb_r, SbMode::exact, opts_.sb_exhaustive_cap).value;
            }
        } else {
            NormHandle outer = handle_from_meta(meta_of(*expr.child));
            outer.norm = [this, child = expr.child, path](const FVec& v) {
                return eval(*child, v, path + ".child");
            };
            DavisParams prm = expr.davis;
            prm.gauge_opts = opts_.gauge_opts;
            value = davis_norm(x, outer, prm).value;
        }
    } catch (const SizeError& e) {
        throw SizeError(std::string(e.what()) + " [at " + path + ": " + canon + "]");
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " [at " + path + ": " + canon + "]",
                          e.diagnostics);
    }

    if (opts_.cache) {
        std::unique_lock lock(mutex_);
        cache_.emplace(std::move(key), value);
    }
    return value;
}

double Evaluator::norm_value(const SpaceExpr& expr, const FVec& x) {
    return eval(expr, x, "root");
}

nlohmann::json Evaluator::certify(const SpaceExpr& expr, const FVec& x, const std::string& path) {
    nlohmann::json cert;
    switch (expr.kind) {
        case SpaceExpr::Kind::lp:
            cert["kind"] = "lp";
            cert["p"] = expr.lp_p;
            cert["value"] = lp_norm(x, expr.lp_p);
            return cert;
        case SpaceExpr::Kind::sb: {
            NormHandle base = handle_from_meta(meta_of(*expr.child));
            base.norm = [this, child = expr.child, path](const FVec& v) {
                return eval(*child, v, path + ".child");
            };
            SbMode mode = (opts_.sb_heuristic_fallback &&
                           x.support_size() > opts_.sb_exhaustive_cap)
                              ? SbMode::heuristic
                              : SbMode::exact;
            SbResult r = sb_norm(x, base, expr.sb_r, mode, opts_.sb_exhaustive_cap);
            cert["kind"] = "sb";
            cert["r"] = expr.sb_r;
            cert["value"] = r.value;
            cert["exact"] = r.exact;
            auto parts = nlohmann::json::array();
            auto block_values = nlohmann::json::array();
            for (const auto& F : r.partition.sets) {
                parts.push_back(F);
                block_values.push_back(base.norm(restrict_to(x, F)));
            }
            cert["partition"] = std::move(parts);
            cert["block_values"] = std::move(block_values);
            return cert;
        }
        case SpaceExpr::Kind::davis: {
            NormHandle outer = handle_from_meta(meta_of(*expr.child));
            outer.norm = [this, child = expr.child, path](const FVec& v) {
                return eval(*child, v, path + ".child");
            };
            DavisParams prm = expr.davis;
            prm.gauge_opts = opts_.gauge_opts;
            DavisValue v = davis_norm(x, outer, prm);
            cert["kind"] = "davis";
            cert["q"] = prm.q;
            cert["p"] = prm.p;
            cert["value"] = v.value;
            cert["k_used"] = v.k_used;
            if (std::isfinite(v.tail_bound)) cert["tail_bound"] = v.tail_bound;
            else cert["tail_bound"] = "unbounded";
            cert["components"] = v.components;
            std::vector<std::pair<Index, double>> comp;
            for (std::size_t k = 0; k < v.components.size(); ++k)
                if (v.components[k] != 0.0)
                    comp.emplace_back(static_cast<Index>(k) + 1, v.components[k]);
            cert["outer"] = certify(*expr.child, FVec::from_pairs(std::move(comp)),
                                    path + ".child");
            return cert;
        }
    }
    return cert;
}

NormResult Evaluator::norm_of(const SpaceExpr& expr, const FVec& x) {
    NormResult out;
    out.value = eval(expr, x, "root");
    out.certificate = certify(expr, x, "root");
    return out;
}

NormHandle Evaluator::handle_for(const SpaceExpr& expr) {
    NormHandle h = handle_from_meta(meta_of(expr));
    auto shared = std::make_shared<SpaceExpr>(expr);
    h.norm = [this, shared](const FVec& v) { return eval(*shared, v, "root"); };
    return h;
}

void Evaluator::load_cache_dir(const std::string& dir) {
    std::ifstream in(dir + "/norm-cache-v1.json");
    if (!in) return;
    nlohmann::json j;
    try {
        in >> j;
    } catch (...) {
        return;  // corrupt cache files are ignored, not fatal
    }
    if (!j.is_object()) return;
    std::unique_lock lock(mutex_);
    for (const auto& [k, v] : j.items())
        if (v.is_number()) cache_.emplace(k, v.get<double>());
}

void Evaluator::flush_cache_dir(const std::string& dir) const {
    nlohmann::json j = nlohmann::json::object();
    {
        std::shared_lock lock(mutex_);
        for (const auto& [k, v] : cache_) j[k] = v;
    }
    std::ofstream out(dir + "/norm-cache-v1.json");
    if (out) out << j.dump();
}

// ---------------------------------------------------------------------------
// chain construction

ChainDescriptor build_chain(double p0, double q0, int k, const ChainPolicy& policy) {
    if (!(p0 > 1.0) || !(q0 >= p0) || !std::isfinite(q0))
        throw std::invalid_argument("build_chain: need 1 < p0 <= q0 < inf");
    if (k < 1) throw std::invalid_argument("build_chain: need k >= 1");
    if (policy.schedule != "pow2" && policy.schedule != "lin")
        throw std::invalid_argument("build_chain: schedule must be pow2 or lin");

    ChainDescriptor desc;
    desc.p0 = p0;
    desc.q0 = q0;

    SpaceExpr current = SpaceExpr::make_lp(p0);
    double q_proxy = q0;  // lower-estimate proxy carried between levels
    double p_proxy = p0;  // convexity proxy carried between levels
    double r_prev = 0.0;

    for (int level = 1; level <= k; ++level) {
        ChainLevel lvl;
        lvl.k = level;
        lvl.q_proxy_in = q_proxy;
        lvl.p_proxy_in = p_proxy;
        lvl.r = std::max(r_prev, q_proxy) + policy.r_step;
        lvl.s = 1.0 + policy.s_frac * (p_proxy - 1.0);
        lvl.t = 1.0 + policy.t_frac * (p_proxy - 1.0);
        lvl.schedule = policy.schedule;
        lvl.truncation_k = policy.truncation_k;
        if (!(lvl.r > q_proxy) || !(1.0 < lvl.s) || !(lvl.s < lvl.t) || !(lvl.t < p_proxy))
            throw std::invalid_argument("build_chain: degenerate parameters at level " +
                                        std::to_string(level));

        DavisParams prm;
        prm.q = lvl.s;
        prm.p = lvl.t;
        prm.schedule.kind = policy.schedule == "pow2" ? DavisSchedule::Kind::pow2
                                                      : DavisSchedule::Kind::lin;
        prm.truncation = DavisTruncation{DavisTruncation::Mode::fixed_k, policy.truncation_k, 0.0};
        current = SpaceExpr::make_davis(SpaceExpr::make_sb(std::move(current), lvl.r), prm);
        lvl.expr_text = format_space(current);
        desc.levels.push_back(lvl);

        r_prev = lvl.r;
        q_proxy = lvl.r;  // the lower lr estimate of the SB stage
        p_proxy = lvl.s;  // declared proxy for the convexity of the new level
    }
    return desc;
}

nlohmann::json ChainDescriptor::to_json() const {
    nlohmann::json j;
    j["schema"] = "chain-v1";
    j["base"] = {{"p0", p0}, {"q0", q0}};
    auto levels_json = nlohmann::json::array();
    for (const auto& lvl : levels) {
        levels_json.push_back({{"k", lvl.k},
                               {"r", lvl.r},
                               {"s", lvl.s},
                               {"t", lvl.t},
                               {"schedule", lvl.schedule},
                               {"truncation_K", lvl.truncation_k},
                               {"q_proxy_in", lvl.q_proxy_in},
                               {"p_proxy_in", lvl.p_proxy_in},
                               {"proxy_note",
                                "q and p proxies are declared surrogates (lower-estimate "
                                "parameter and gauge index), not computed convexity exponents"},
                               {"expr", lvl.expr_text}});
    }
    j["levels"] = std::move(levels_json);
    return j;
}

}  // namespace banachkit
