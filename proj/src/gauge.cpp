#include "banachkit/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "banachkit/errors.hpp"

namespace banachkit {

void GaugeParams::validate() const {
    if (!(q >= 1.0) || !(p > q) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("gauge params: need 1 <= q < p < inf");
    if (!(m >= 1.0) || !std::isfinite(m))
        throw std::invalid_argument("gauge params: need 1 <= m < inf");
}

namespace {

// Separable KKT solver for min ||x - m*y||_p s.t. ||y||_q <= t, acting on
// nonnegative coordinate values. State is kept across calls so outer loops
// warm-start the per-coordinate Newton iterations.
class InnerSolver {
public:
    InnerSolver(std::vector<double> xs, GaugeParams params, GaugeOptions opts)
        : xs_(std::move(xs)), prm_(params), opts_(opts), u_(xs_.size(), 0.0) {
        xq_sum_ = 0.0;
        for (double v : xs_) xq_sum_ += std::pow(v / prm_.m, prm_.q);
        t_unconstrained_ = std::pow(xq_sum_, 1.0 / prm_.q);
    }

    // ||x/m||_q: above this level the constraint is inactive.
    double t_unconstrained() const { return t_unconstrained_; }

    // Solves for the given balance level; returns ||x - m*y||_p.
    double project(double t) {
        const double q = prm_.q;
        if (t <= 0.0) {
            std::fill(u_.begin(), u_.end(), 0.0);
            return residual();
        }
        if (t >= t_unconstrained_) {
            u_ = xs_;
            return 0.0;
        }
        const double target = std::pow(t, q);
        // nu = 0 gives u = x (sum above target); grow nu until below.
        double nu_lo = 0.0;
        double nu_hi = initial_nu_hi();
        while (sum_q(nu_hi) > target) {
            nu_lo = nu_hi;
            nu_hi *= 4.0;
            if (!std::isfinite(nu_hi))
                throw SolverError("inner projection: multiplier search diverged", diag(t, nu_hi));
        }
        int it = 0;
        for (; it < opts_.max_bisect; ++it) {
            double nu = 0.5 * (nu_lo + nu_hi);
            double s = sum_q(nu);
            if (s > target) nu_lo = nu; else nu_hi = nu;
            if (nu_hi - nu_lo <= 1e-14 * nu_hi) break;
        }
        if (it == opts_.max_bisect && nu_hi - nu_lo > 1e-10 * nu_hi)
            throw SolverError("inner projection: multiplier bisection hit iteration cap", diag(t, nu_hi));
        sum_q(nu_hi);  // leave u_ at the feasible (||y||_q <= t) side
        return residual();
    }

    // y values (u/m) in the same coordinate order as xs.
    std::vector<double> y_values() const {
        std::vector<double> y(u_.size());
        for (std::size_t i = 0; i < u_.size(); ++i) y[i] = u_[i] / prm_.m;
        return y;
    }

    double residual() const {
        double s = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) s += std::pow(xs_[i] - u_[i], prm_.p);
        return std::pow(s, 1.0 / prm_.p);
    }

private:
    double initial_nu_hi() const {
        // At this nu the q = 1 closed form already zeroes the largest
        // coordinate; it is a good doubling seed for q > 1 as well.
        double xmax = xs_.empty() ? 1.0 : xs_.front();
        for (double v : xs_) xmax = std::max(xmax, v);
        return std::max(1.0, prm_.p * prm_.m * std::pow(xmax, prm_.p - 1.0));
    }

    // Sets u_ to the per-coordinate minimizers for multiplier nu and returns
    // sum (u_i/m)^q.
    double sum_q(double nu) {
        const double q = prm_.q, p = prm_.p, m = prm_.m;
        double s = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            const double x = xs_[i];
            if (x == 0.0) { u_[i] = 0.0; continue; }
            double u;
            if (q == 1.0) {
                // stationarity p*m*(x-u)^(p-1) = nu, clipped at u = 0
                u = x - std::pow(nu / (p * m), 1.0 / (p - 1.0));
                if (u < 0.0) u = 0.0;
            } else if (nu == 0.0) {
                u = x;
            } else {
                u = solve_coordinate(x, nu, u_[i]);
            }
            u_[i] = u;
            s += std::pow(u / m, q);
        }
        return s;
    }

    // Root of g(u) = p*m*(x-u)^(p-1) - nu*q*(u/m)^(q-1) on (0, x); g is
    // strictly decreasing with g(0+) > 0 > g(x-). Safeguarded Newton with a
    // bisection fallback, warm-started from the previous solution.
    double solve_coordinate(double x, double nu, double warm) const {
        const double q = prm_.q, p = prm_.p, m = prm_.m;
        double lo = 0.0, hi = x;
        double u = (warm > 0.0 && warm < x) ? warm : 0.5 * x;
        for (int it = 0; it < opts_.max_newton; ++it) {
            const double rx = x - u;
            const double g = p * m * std::pow(rx, p - 1.0) - nu * q * std::pow(u / m, q - 1.0);
            if (g > 0.0) lo = u; else hi = u;
            if (hi - lo <= 1e-15 * x) break;
            const double dg = -p * m * (p - 1.0) * std::pow(rx, p - 2.0)
                              - nu * q * (q - 1.0) / m * std::pow(u / m, q - 2.0);
            double next = u - g / dg;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - u) <= 1e-16 * x) { u = next; break; }
            u = next;
        }
        return std::clamp(u, lo, hi);
    }

    std::string diag(double t, double nu) const {
        std::ostringstream os;
        os << "q=" << prm_.q << " p=" << prm_.p << " m=" << prm_.m << " t=" << t << " nu=" << nu
           << " dim=" << xs_.size();
        return os.str();
    }

    std::vector<double> xs_;
    GaugeParams prm_;
    GaugeOptions opts_;
    std::vector<double> u_;
    double xq_sum_ = 0.0;
    double t_unconstrained_ = 0.0;
};

// Canonical reduction: both gauges are symmetric norms, so we solve on the
// absolute values sorted non-increasing and map witnesses back through the
// recorded (index, sign) list. This also makes the computed value exactly
// invariant under permutations and sign flips of the input.
struct Canonical {
    std::vector<double> values;               // nonneg, non-increasing, scaled to max 1
    double scale = 1.0;                       // original max |x_i|
    std::vector<std::pair<Index, double>> back;  // (original index, sign) per position

    static Canonical of(const FVec& x) {
        Canonical c;
        auto entries = x.entries();
        std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return std::abs(a.second) > std::abs(b.second);
        });
        c.scale = entries.empty() ? 1.0 : std::abs(entries.front().second);
        for (const auto& [i, v] : entries) {
            c.values.push_back(std::abs(v) / c.scale);
            c.back.emplace_back(i, v < 0.0 ? -1.0 : 1.0);
        }
        return c;
    }

    FVec restore(const std::vector<double>& vals, double factor) const {
        std::vector<std::pair<Index, double>> entries;
        entries.reserve(vals.size());
        for (std::size_t j = 0; j < vals.size(); ++j)
            entries.emplace_back(back[j].first, back[j].second * vals[j] * factor);
        return FVec::from_pairs(std::move(entries));
    }
};

bool all_entries_equal_abs(const FVec& x) {
    if (x.is_flat()) return true;
    const auto& e = x.entries();
    for (const auto& [i, v] : e)
        if (std::abs(v) != std::abs(e.front().second)) return false;
    return true;
}

GaugeResult flat_closed_form(const FVec& x, const GaugeParams& prm, GaugeVariant variant) {
    const double n = static_cast<double>(x.support_size());
    const double v_unit = flat_gauge_oracle(x.support_size(), prm, variant);
    // Optimal flat decomposition, expressed as multiples of x itself:
    // y = alpha*x, z = beta*x with m*alpha + beta/m = 1.
    double alpha, beta;
    if (variant == GaugeVariant::gauge) {
        alpha = v_unit * std::pow(n, -1.0 / prm.q);
        beta = v_unit * std::pow(n, -1.0 / prm.p);
    } else {
        alpha = v_unit * v_unit * prm.m * std::pow(n, -2.0 / prm.q);
        beta = v_unit * v_unit / prm.m * std::pow(n, -2.0 / prm.p);
    }
    GaugeResult r;
    r.value = x.max_abs() * v_unit;
    r.y = x.scaled(alpha);
    r.z = x.scaled(beta);
    r.variant = variant;
    r.residual_certificate = 0.0;
    return r;
}

GaugeResult zero_result(GaugeVariant variant) {
    GaugeResult r;
    r.variant = variant;
    return r;
}

double lq_of(const std::vector<double>& vals, double q) {
    double s = 0.0;
    for (double v : vals) s += std::pow(v, q);
    return std::pow(s, 1.0 / q);
}

GaugeResult finish(const Canonical& canon, InnerSolver& solver, double t, const GaugeParams& prm,
                   GaugeVariant variant, double bracket) {
    const double resid = solver.project(t);
    auto y_vals = solver.y_values();
    std::vector<double> z_vals(y_vals.size());
    for (std::size_t i = 0; i < y_vals.size(); ++i)
        z_vals[i] = prm.m * (canon.values[i] - prm.m * y_vals[i]);
    const double ny = lq_of(y_vals, prm.q);
    const double nz = prm.m * resid;
    GaugeResult r;
    r.variant = variant;
    r.value = canon.scale * (variant == GaugeVariant::gauge
                                 ? std::max(ny, nz)
                                 : std::sqrt(ny * ny + nz * nz));
    r.y = canon.restore(y_vals, canon.scale);
    r.z = canon.restore(z_vals, canon.scale);
    r.residual_certificate = canon.scale * bracket;
    return r;
}

}  // namespace

double flat_gauge_oracle(Index n, const GaugeParams& params, GaugeVariant variant) {
    params.validate();
    if (n < 1) throw std::invalid_argument("flat_gauge_oracle: need n >= 1");
    const double nd = static_cast<double>(n);
    if (variant == GaugeVariant::gauge)
        return 1.0 / (params.m * std::pow(nd, -1.0 / params.q) +
                      std::pow(nd, -1.0 / params.p) / params.m);
    return 1.0 / std::sqrt(params.m * params.m * std::pow(nd, -2.0 / params.q) +
                           std::pow(nd, -2.0 / params.p) / (params.m * params.m));
}

FVec inner_projection(const FVec& x, double t, const GaugeParams& params,
                      const GaugeOptions& opts) {
    params.validate();
    if (t < 0.0) throw std::invalid_argument("inner_projection: need t >= 0");
    if (x.empty()) return FVec{};
    auto canon = Canonical::of(x);
    InnerSolver solver(canon.values, params, opts);
    solver.project(t / canon.scale);
    return canon.restore(solver.y_values(), canon.scale);
}

GaugeResult gauge_qpm(const FVec& x, const GaugeParams& params, const GaugeOptions& opts) {
    params.validate();
    if (!(opts.tol > 0.0) || opts.tol > 1e-2)
        throw std::invalid_argument("gauge: tol must lie in (0, 1e-2]");
    if (x.empty()) return zero_result(GaugeVariant::gauge);
    if (all_entries_equal_abs(x) && !opts.force_generic)
        return flat_closed_form(x, params, GaugeVariant::gauge);

    auto canon = Canonical::of(x);
    InnerSolver solver(canon.values, params, opts);
    // t - m*phi(t) is increasing, negative at 0 and positive at ||x/m||_q;
    // the gauge value is the crossing point.
    double lo = 0.0, hi = solver.t_unconstrained();
    for (int it = 0; it < opts.max_bisect; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double h = mid - params.m * solver.project(mid);
        if (h < 0.0) lo = mid; else hi = mid;
        if (lo > 0.0 && hi - lo <= opts.tol * lo) break;
    }
    return finish(canon, solver, 0.5 * (lo + hi), params, GaugeVariant::gauge, hi - lo);
}

GaugeResult gauge2_qpm(const FVec& x, const GaugeParams& params, const GaugeOptions& opts) {
    params.validate();
    if (!(opts.tol > 0.0) || opts.tol > 1e-2)
        throw std::invalid_argument("gauge: tol must lie in (0, 1e-2]");
    if (x.empty()) return zero_result(GaugeVariant::gauge2);
    if (all_entries_equal_abs(x) && !opts.force_generic)
        return flat_closed_form(x, params, GaugeVariant::gauge2);

    auto canon = Canonical::of(x);
    InnerSolver solver(canon.values, params, opts);
    // t^2 + m^2*phi(t)^2 is convex in t (phi is convex, nonnegative,
    // non-increasing); golden-section search.
    const double m2 = params.m * params.m;
    auto objective = [&](double t) {
        const double r = solver.project(t);
        return t * t + m2 * r * r;
    };
    constexpr double invphi = 0.6180339887498949;
    double a = 0.0, b = solver.t_unconstrained();
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = objective(c), fd = objective(d);
    for (int it = 0; it < opts.max_bisect && (b - a) > opts.tol * std::max(c, 1e-300); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = objective(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = objective(d);
        }
    }
    return finish(canon, solver, 0.5 * (a + b), params, GaugeVariant::gauge2, b - a);
}

}  // namespace banachkit
