#include "banachkit/davis.hpp"

#include <cmath>
#include <limits>

#include "banachkit/errors.hpp"

namespace banachkit {

double DavisSchedule::m(int k) const {
    switch (kind) {
        case Kind::pow2: return std::ldexp(1.0, k);
        case Kind::lin: return static_cast<double>(k);
        case Kind::explicit_list: return list.at(static_cast<std::size_t>(k) - 1);
    }
    return 0.0;
}

int DavisSchedule::max_components() const {
    return kind == Kind::explicit_list ? static_cast<int>(list.size())
                                       : std::numeric_limits<int>::max();
}

bool DavisSchedule::summable_reciprocals() const { return kind != Kind::lin; }

void DavisSchedule::validate() const {
    if (kind != Kind::explicit_list) return;
    if (list.empty()) throw std::invalid_argument("davis schedule: explicit list is empty");
    if (list.front() < 1.0) throw std::invalid_argument("davis schedule: need m_1 >= 1");
    for (std::size_t i = 1; i < list.size(); ++i)
        if (!(list[i] > list[i - 1]))
            throw std::invalid_argument("davis schedule: m-sequence must be strictly increasing");
}

void DavisParams::validate() const {
    if (!(q > 1.0) || !(p > q) || !std::isfinite(p))
        throw std::invalid_argument("davis params: need 1 < q < p < inf");
    schedule.validate();
    if (truncation.mode == DavisTruncation::Mode::fixed_k) {
        if (truncation.fixed_k < 1) throw std::invalid_argument("davis params: need K >= 1");
    } else {
        if (!(truncation.eps > 0.0)) throw std::invalid_argument("davis params: need eps > 0");
        if (!schedule.summable_reciprocals())
            throw std::invalid_argument(
                "davis params: schedule has non-summable reciprocals; eps-mode truncation has no "
                "certified tail (use a fixed K)");
    }
}

namespace {

GaugeParams component_params(const DavisParams& params, int k) {
    return GaugeParams{params.q, params.p, params.schedule.m(k)};
}

double component_gauge(const FVec& x, const DavisParams& params, int k) {
    const auto gp = component_params(params, k);
    return params.use_max_variant ? gauge_qpm(x, gp, params.gauge_opts).value
                                  : gauge2_qpm(x, gp, params.gauge_opts).value;
}

constexpr int kMaxEpsComponents = 64;

}  // namespace

double davis_tail_bound(const FVec& x, const DavisParams& params, int K) {
    params.validate();
    if (K < 0) throw std::invalid_argument("davis_tail_bound: need K >= 0");
    const double factor = params.use_max_variant ? 1.0 : std::sqrt(2.0);
    const double xq = lp_norm(x, params.q);
    if (params.schedule.kind == DavisSchedule::Kind::explicit_list) {
        double s = 0.0;
        for (int k = K + 1; k <= params.schedule.max_components(); ++k) {
            const double m = params.schedule.m(k);
            s += 1.0 / (m + 1.0 / m);
        }
        return factor * xq * s;
    }
    if (!params.schedule.summable_reciprocals())
        throw std::invalid_argument("davis_tail_bound: non-summable schedule has no finite bound");
    // pow2: sum a partial stretch exactly, then majorize the rest by the
    // geometric series sum_{k > K + 128} 2^-k = 2^-(K + 128).
    double s = 0.0;
    for (int k = K + 1; k <= K + 128; ++k) {
        const double m = params.schedule.m(k);
        const double term = 1.0 / (m + 1.0 / m);
        s += term;
        if (term == 0.0) break;
    }
    s += std::ldexp(1.0, -(K + 128 > 1000 ? 1000 : K + 128));
    return factor * xq * s;
}

DavisValue davis_norm(const FVec& x, const NormHandle& outer, const DavisParams& params) {
    params.validate();
    if (!outer.monotone || !outer.unconditional)
        throw std::invalid_argument("davis_norm: outer norm must be monotone and 1-unconditional");
    if (!outer.basis_norm_le_one)
        throw std::invalid_argument(
            "davis_norm: outer basis norms must be <= 1 for the certified tail bound");

    DavisValue out;
    if (x.empty()) return out;

    int K;
    if (params.truncation.mode == DavisTruncation::Mode::fixed_k) {
        K = std::min(params.truncation.fixed_k, params.schedule.max_components());
    } else {
        K = 1;
        const int cap = std::min(kMaxEpsComponents, params.schedule.max_components());
        while (K < cap && davis_tail_bound(x, params, K) > params.truncation.eps) ++K;
        if (davis_tail_bound(x, params, K) > params.truncation.eps)
            throw SolverError("davis_norm: eps-mode truncation unreachable within " +
                                  std::to_string(cap) + " components",
                              "eps=" + format_double(params.truncation.eps));
    }

    out.k_used = K;
    out.components.reserve(static_cast<std::size_t>(K));
    std::vector<std::pair<Index, double>> comp_entries;
    for (int k = 1; k <= K; ++k) {
        const double g = component_gauge(x, params, k);
        out.components.push_back(g);
        if (g != 0.0) comp_entries.emplace_back(k, g);
    }
    out.value = outer.norm(FVec::from_pairs(std::move(comp_entries)));
    out.tail_bound = params.schedule.kind == DavisSchedule::Kind::lin
                         ? std::numeric_limits<double>::infinity()
                         : davis_tail_bound(x, params, K);

    if (params.normalize) {
        DavisParams raw = params;
        raw.normalize = false;
        out.basis_norm = davis_norm(FVec::unit(1), outer, raw).value;
        out.value /= out.basis_norm;
        out.tail_bound /= out.basis_norm;
    }
    return out;
}

FVec j_map(const FVec& x_diag) { return x_diag; }

double estimate_j_norm(const std::vector<FVec>& sample, const NormHandle& outer,
                       const DavisParams& params) {
    double best = 0.0;
    for (const FVec& x : sample) {
        if (x.empty()) continue;
        const double d = davis_norm(x, outer, params).value;
        if (d == 0.0) continue;
        best = std::max(best, lp_norm(j_map(x), params.p) / d);
    }
    return best;
}

}  // namespace banachkit
