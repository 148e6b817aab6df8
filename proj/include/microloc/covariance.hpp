#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/estimate.hpp"
#include "microloc/parallel.hpp"
#include "microloc/process_spec.hpp"
#include "microloc/quadrature.hpp"
#include "microloc/rng.hpp"
#include "microloc/stats.hpp"
#include "microloc/synth.hpp"

namespace microloc {

// --- exact kernel integrals -----------------------------------------------------

namespace detail {

// int_a^b |u-t0|^g |sin(|u-t0|^-beta)|^q du via the tail substitution; the
// infinitely oscillating endpoint at u = t0 is handled exactly by splitting
// there.
class ChirpPowerIntegral {
public:
    ChirpPowerIntegral(double g, double q, double beta, double t0)
        : g_(g), beta_(beta), t0_(t0), tail_((g + 1.0) / beta, q) {}

    double operator()(double a, double b) const {
        if (a > b) return (*this)(b, a);
        const double ra = a - t0_, rb = b - t0_;
        if (ra >= 0.0) return one_sided(rb) - one_sided(ra);
        if (rb <= 0.0) return one_sided(-ra) - one_sided(-rb);
        return one_sided(-ra) + one_sided(rb);
    }

private:
    double one_sided(double x) const { // int_0^x v^g |sin v^-beta|^q dv, x >= 0
        if (x <= 0.0) return 0.0;
        return tail_(std::pow(x, -beta_)) / beta_;
    }

    double g_, beta_, t0_;
    AbsSinPowerTail tail_;
};

// int_a^b |eta|^p du for the kernel families; p = 2 gives the Wiener variance
// integrand, p = alpha the stable one.
class KernelPowerIntegral {
public:
    KernelPowerIntegral(const ScalarFunctionSpec& eta, double p) : p_(p) {
        if (const auto* c = std::get_if<ConstantFn>(&eta)) {
            kind_ = Kind::Constant;
            const_pow_ = std::pow(std::abs(c->c), p);
        } else if (const auto* pw = std::get_if<PowerFn>(&eta)) {
            kind_ = Kind::Power;
            t0_ = pw->t0;
            g_ = p * pw->gamma;
        } else if (const auto* ch = std::get_if<ChirpFn>(&eta)) {
            kind_ = Kind::Chirp;
            t0_ = ch->t0;
            chirp_ = std::make_shared<ChirpPowerIntegral>(p * ch->gamma, p, ch->beta, ch->t0);
        } else if (const auto* sq = std::get_if<SqrtAbsChirpFn>(&eta)) {
            kind_ = Kind::Chirp;
            t0_ = sq->t0;
            chirp_ = std::make_shared<ChirpPowerIntegral>(p * sq->gamma / sq->root_order,
                                                          p / sq->root_order, sq->beta, sq->t0);
        } else if (const auto* tb = std::get_if<TableFn>(&eta)) {
            kind_ = Kind::Numeric;
            table_ = *tb;
        } else {
            throw UnsupportedError("unsupported kernel family for exact integration");
        }
    }

    double operator()(double a, double b) const {
        if (a > b) return (*this)(b, a);
        switch (kind_) {
            case Kind::Constant:
                return const_pow_ * (b - a);
            case Kind::Power: {
                auto prim = [&](double v) {
                    const double r = v - t0_;
                    return std::copysign(std::pow(std::abs(r), g_ + 1.0), r) / (g_ + 1.0);
                };
                return prim(b) - prim(a);
            }
            case Kind::Chirp:
                return (*chirp_)(a, b);
            case Kind::Numeric: {
                const ScalarFunctionSpec spec = table_;
                const double p = p_;
                return integrate(
                    [&](double u) { return std::pow(std::abs(evaluate(spec, u)), p); }, a, b,
                    1e-9);
            }
        }
        return 0.0;
    }

private:
    enum class Kind { Constant, Power, Chirp, Numeric };
    Kind kind_ = Kind::Constant;
    double p_ = 2.0;
    double const_pow_ = 0.0;
    double t0_ = 0.0;
    double g_ = 0.0;
    std::shared_ptr<ChirpPowerIntegral> chirp_;
    TableFn table_;
};

} // namespace detail

// Exact incremental second moment E[X_t - X_u]^2 evaluator. For stable
// integrals the returned quantity is int_u^t |eta|^alpha (the p-moment
// assembly is left to the caller; the constant C(alpha,p) cancels in
// log-regressions and is never assumed).
class ExactVariance {
public:
    explicit ExactVariance(const ProcessSpec& spec) : spec_(spec) {
        validate(spec_);
        if (const auto* w = std::get_if<WienerIntegralSpec>(&spec_)) {
            kernel_ = std::make_shared<detail::KernelPowerIntegral>(w->eta, 2.0);
        } else if (const auto* s = std::get_if<StableIntegralSpec>(&spec_)) {
            kernel_ = std::make_shared<detail::KernelPowerIntegral>(s->eta, s->alpha);
        } else if (std::holds_alternative<MBmSpec>(spec_)) {
            throw UnsupportedError(
                "mBm has no closed incremental variance; use incremental_variance_mc");
        }
    }

    double operator()(double t, double u) const {
        if (const auto* f = std::get_if<FBmSpec>(&spec_)) {
            return std::pow(std::abs(t - u), 2.0 * f->hurst);
        }
        if (const auto* g = std::get_if<GWSpec>(&spec_)) {
            return gw_series(*g, t, u);
        }
        if (const auto* w = std::get_if<WienerIntegralSpec>(&spec_)) {
            const double drift = evaluate(w->psi, t) - evaluate(w->psi, u);
            return std::abs((*kernel_)(u, t)) + drift * drift;
        }
        const auto& s = std::get<StableIntegralSpec>(spec_);
        (void)s;
        return std::abs((*kernel_)(u, t));
    }

    static double gw_series(const GWSpec& g, double t, double u) {
        const double ht = evaluate(g.h, t), hu = evaluate(g.h, u);
        const double log_lambda = std::log(g.lambda);
        double s = 0.0;
        for (int j = 1; j <= g.depth; ++j) {
            const double lj = std::exp(j * log_lambda);
            const double term = std::exp(-j * ht * log_lambda) * std::sin(lj * t) -
                                std::exp(-j * hu * log_lambda) * std::sin(lj * u);
            s += term * term;
        }
        return s;
    }

private:
    ProcessSpec spec_;
    std::shared_ptr<detail::KernelPowerIntegral> kernel_;
};

inline double incremental_variance_exact(const ProcessSpec& spec, double t, double u) {
    return ExactVariance(spec)(t, u);
}

struct McVariance {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double t_used = 0.0, u_used = 0.0; // grid-snapped evaluation points
};

// Ensemble mean of (X_t - X_u)^2 over freshly synthesized paths; the Monte
// Carlo oracle for the exact forms above (and the only incremental variance
// available for mBm).
inline McVariance incremental_variance_mc(const ProcessSpec& spec, double t, double u,
                                          std::size_t n_paths, std::uint64_t seed,
                                          std::size_t n_grid = 2048, unsigned workers = 0) {
    if (n_paths < 100) throw ParameterError("incremental_variance_mc requires n_paths >= 100");
    const double t_max = std::max({t, u, 1e-9});
    const double dt = t_max / static_cast<double>(n_grid - 1);
    const auto it = static_cast<std::size_t>(std::round(t / dt));
    const auto iu = static_cast<std::size_t>(std::round(u / dt));
    McVariance out;
    out.t_used = static_cast<double>(it) * dt;
    out.u_used = static_cast<double>(iu) * dt;
    if (it == iu) return out;
    std::vector<double> sq(n_paths);
    parallel_for(
        n_paths,
        [&](std::size_t i) {
            const SampledPath p = synthesize(spec, n_grid, dt, seed, i);
            const double d = p.values[it] - p.values[iu];
            sq[i] = d * d;
        },
        workers);
    out.estimate = mean(sq);
    out.stderr_ = stderr_of_mean(sq);
    return out;
}

// --- deterministic frontier -------------------------------------------------------

struct DeterministicFrontier {
    double t0 = 0.0;
    std::vector<double> s_grid;
    std::vector<double> sigma_hat;
    std::vector<double> stderr_;
    double fit_residual = 0.0;

    double max_concavity_violation() const {
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < s_grid.size(); ++i) {
            const double sl0 = (sigma_hat[i] - sigma_hat[i - 1]) / (s_grid[i] - s_grid[i - 1]);
            const double sl1 = (sigma_hat[i + 1] - sigma_hat[i]) / (s_grid[i + 1] - s_grid[i]);
            worst = std::max(worst, sl1 - sl0);
        }
        return worst;
    }
};

// The deterministic 2-microlocal frontier: the empirical estimator's dyadic
// ray machinery applied to sqrt(E[X_t-X_u]^2) instead of pathwise
// oscillations, over the same cone, so pathwise-vs-deterministic comparisons
// are like-for-like.
inline DeterministicFrontier deterministic_frontier(const ProcessSpec& spec, double t0,
                                                    std::span<const double> s_grid, int n_min,
                                                    int n_max, int j_floor) {
    if (n_max - n_min < 3) {
        throw ResolutionError("need n_max - n_min >= 3 scales, got " +
                              std::to_string(n_max - n_min));
    }
    const ExactVariance var(spec);

    // per-cell max and rms of sqrt-variance over adjacent dyadic pairs
    struct Cell {
        double max_v = 0.0, sum = 0.0;
        std::size_t count = 0;
    };
    std::vector<std::vector<Cell>> cells(static_cast<std::size_t>(n_max - n_min + 1));
    for (int n = n_min; n <= n_max; ++n) {
        const int m_max = std::max(0, j_floor - n);
        auto& row = cells[static_cast<std::size_t>(n - n_min)];
        row.resize(static_cast<std::size_t>(m_max + 1));
        for (int m = 0; m <= m_max; ++m) {
            const double spacing = std::pow(2.0, -(m + n));
            const auto half = static_cast<long>(1L << m);
            auto& c = row[static_cast<std::size_t>(m)];
            for (long k = -half; k < half; ++k) {
                const double a = t0 + static_cast<double>(k) * spacing;
                const double v = var(a + spacing, a);
                c.max_v = std::max(c.max_v, v);
                c.sum += v;
                ++c.count;
            }
        }
    }

    auto m_max_of = [&](int n) {
        return static_cast<int>(cells[static_cast<std::size_t>(n - n_min)].size()) - 1;
    };
    auto cell_y = [&](int n, int m) {
        double best = std::numeric_limits<double>::infinity();
        const auto& row = cells[static_cast<std::size_t>(n - n_min)];
        for (int mm = m - 1; mm <= m + 1; ++mm) {
            if (mm < 0 || mm >= static_cast<int>(row.size())) continue;
            const auto& c = row[static_cast<std::size_t>(mm)];
            if (c.count == 0 || c.max_v <= 0.0) continue;
            // rms of the sqrt-variances = sqrt of the mean variance
            const double rms = std::sqrt(c.sum / static_cast<double>(c.count));
            best = std::min(best, detail::cell_statistic(std::sqrt(c.max_v), rms, c.count));
        }
        return best;
    };

    DeterministicFrontier out;
    out.t0 = t0;
    out.s_grid.assign(s_grid.begin(), s_grid.end());
    double pooled = 0.0;
    std::size_t pooled_n = 0;
    for (double sp : s_grid) {
        const auto fit = detail::ray_min_fit(n_min, n_max, sp, cell_y, m_max_of);
        if (fit.empty) {
            out.sigma_hat.push_back(std::numeric_limits<double>::infinity());
            out.stderr_.push_back(0.0);
        } else {
            out.sigma_hat.push_back(fit.slope);
            out.stderr_.push_back(fit.stderr_);
            pooled += fit.residual * fit.residual;
            ++pooled_n;
        }
    }
    out.fit_residual = pooled_n ? std::sqrt(pooled / static_cast<double>(pooled_n)) : 0.0;
    return out;
}

// --- moment condition (general lower-bound machinery) ------------------------------

struct MomentCondition {
    double eta_order = 2.0; // moment power, > 0
    double mu = 0.5;        // > 0
    double nu = -0.1;       // < 0
    double c = 1.0;         // > 0
    double rho0 = 0.25;     // largest ball radius checked
};

inline void validate(const MomentCondition& m) {
    if (!(m.eta_order > 0.0 && m.mu > 0.0 && m.nu < 0.0 && m.c > 0.0 && m.rho0 > 0.0))
        throw ParameterError("moment condition requires eta > 0, mu > 0, nu < 0, C > 0, rho0 > 0");
}

struct MomentCheckReport {
    double max_ratio = 0.0;          // sup of E|dX|^eta / (C h^(1+mu) rho^-nu)
    double implied_s_prime = 0.0;    // nu / eta
    double implied_sigma = 0.0;      // mu / eta
    std::size_t cells = 0;
};

// Empirical check of E|X_t-X_u|^eta <= C ||t-u||^(1+mu) rho^-nu over dyadic
// balls; a bounded ratio certifies the lower-bound point
// sigma(nu/eta) >= mu/eta.
inline MomentCheckReport check_moment_condition(const ProcessSpec& spec, double t0,
                                                const MomentCondition& cond,
                                                std::size_t n_paths, std::size_t n_grid,
                                                std::uint64_t seed, unsigned workers = 0) {
    validate(cond);
    const double dt = 1.0 / static_cast<double>(n_grid - 1);
    std::vector<SampledPath> paths(n_paths);
    parallel_for(
        n_paths, [&](std::size_t i) { paths[i] = synthesize(spec, n_grid, dt, seed, i); },
        workers);

    const int n_min = std::max(2, static_cast<int>(std::ceil(-std::log2(cond.rho0))));
    const int n_max = default_n_max(n_grid);
    const int j_floor = static_cast<int>(std::floor(std::log2(1.0 / dt))) - 2;

    MomentCheckReport rep;
    rep.implied_s_prime = cond.nu / cond.eta_order;
    rep.implied_sigma = cond.mu / cond.eta_order;
    for (int n = n_min; n <= n_max; ++n) {
        const double rho = std::pow(2.0, -n);
        for (int m = 0; m + n <= j_floor; ++m) {
            const double spacing = std::pow(2.0, -(m + n));
            const auto half = static_cast<long>(1L << m);
            const double bound =
                cond.c * std::pow(spacing, 1.0 + cond.mu) * std::pow(rho, -cond.nu);
            for (long k = -half; k < half; ++k) {
                const double ta = t0 + static_cast<double>(k) * spacing;
                const double tb = ta + spacing;
                if (ta < 0.0 || tb > 1.0) continue;
                const auto ia = static_cast<std::size_t>(std::round(ta / dt));
                const auto ib = static_cast<std::size_t>(std::round(tb / dt));
                if (ia == ib) continue;
                double acc = 0.0;
                for (const auto& p : paths) {
                    acc += std::pow(std::abs(p.values[ib] - p.values[ia]), cond.eta_order);
                }
                const double moment = acc / static_cast<double>(n_paths);
                rep.max_ratio = std::max(rep.max_ratio, moment / bound);
            }
            ++rep.cells;
        }
    }
    return rep;
}

// E[Y^(2p)] / (E[Y^2])^p from pre-powered samples; ~ (2p-1)!! for Gaussians.
inline double gaussian_moment_ratio(std::span<const double> y_squared,
                                    std::span<const double> y_pow_2p, int p) {
    if (p < 1 || p > 3) throw ParameterError("gaussian_moment_ratio supports p in {1,2,3}");
    return mean(y_pow_2p) / std::pow(mean(y_squared), p);
}

inline double gaussian_moment_ratio_from_samples(std::span<const double> y, int p) {
    std::vector<double> y2(y.size()), y2p(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y2[i] = y[i] * y[i];
        y2p[i] = std::pow(y[i], 2 * p);
    }
    return gaussian_moment_ratio(y2, y2p, p);
}

// --- mBm covariance expansion fit ---------------------------------------------------

struct MbmExpansionReport {
    double k_hat = 0.0;
    double l_hat = 0.0;
    bool l_identifiable = false;
    std::vector<int> scales;             // ball scales n (rho = 2^-n)
    std::vector<double> rel_residual;    // per-scale relative fit residual
    bool pass = false;                   // residual < 10% at the two finest scales
};

// Fit the local covariance expansion E[X_t-X_u]^2 ~ K |t-u|^(2H(t)) + L (H(t)-H(u))^2
// to Monte Carlo incremental variances over shrinking balls.
inline MbmExpansionReport mbm_expansion_check(const ScalarFunctionSpec& h, double t0,
                                              std::span<const int> scales, std::size_t n_paths,
                                              std::size_t n_grid, std::uint64_t seed,
                                              unsigned workers = 0) {
    const double dt = 1.0 / static_cast<double>(n_grid - 1);
    std::vector<SampledPath> paths(n_paths);
    parallel_for(
        n_paths, [&](std::size_t i) { paths[i] = synth_mbm(h, n_grid, dt, seed, i); }, workers);

    struct Row {
        double basis_k, basis_l, value;
        int scale;
    };
    std::vector<Row> rows;
    const int j_floor = static_cast<int>(std::floor(std::log2(1.0 / dt))) - 2;
    for (int n : scales) {
        for (int m = 0; m + n <= j_floor && m <= 6; ++m) {
            const double spacing = std::pow(2.0, -(m + n));
            const auto half = static_cast<long>(1L << m);
            for (long k = -half; k < half; ++k) {
                const double ta = t0 + static_cast<double>(k) * spacing;
                const double tb = ta + spacing;
                if (ta < 0.0 || tb > 1.0) continue;
                const auto ia = static_cast<std::size_t>(std::round(ta / dt));
                const auto ib = static_cast<std::size_t>(std::round(tb / dt));
                if (ia == ib) continue;
                double acc = 0.0;
                for (const auto& p : paths) {
                    const double d = p.values[ib] - p.values[ia];
                    acc += d * d;
                }
                const double ht = evaluate(h, tb), hu = evaluate(h, ta);
                rows.push_back({std::pow(spacing, 2.0 * ht), (ht - hu) * (ht - hu),
                                acc / static_cast<double>(n_paths), n});
            }
        }
    }

    MbmExpansionReport rep;
    rep.scales.assign(scales.begin(), scales.end());
    double skk = 0.0, sll = 0.0, skl = 0.0, skv = 0.0, slv = 0.0;
    for (const auto& r : rows) {
        skk += r.basis_k * r.basis_k;
        sll += r.basis_l * r.basis_l;
        skl += r.basis_k * r.basis_l;
        skv += r.basis_k * r.value;
        slv += r.basis_l * r.value;
    }
    const double det = skk * sll - skl * skl;
    rep.l_identifiable = sll > 1e-30 && std::abs(det) > 1e-18 * skk * std::max(sll, 1e-30);
    if (rep.l_identifiable) {
        rep.k_hat = (skv * sll - slv * skl) / det;
        rep.l_hat = (slv * skk - skv * skl) / det;
        if (rep.l_hat < 0.0) rep.l_identifiable = false;
    }
    if (!rep.l_identifiable) {
        rep.k_hat = skv / skk;
        rep.l_hat = 0.0;
    }

    for (int n : rep.scales) {
        double num = 0.0, den = 0.0;
        for (const auto& r : rows) {
            if (r.scale != n) continue;
            const double fit = rep.k_hat * r.basis_k + rep.l_hat * r.basis_l;
            num += (r.value - fit) * (r.value - fit);
            den += r.value * r.value;
        }
        rep.rel_residual.push_back(den > 0.0 ? std::sqrt(num / den) : 0.0);
    }
    if (rep.rel_residual.size() >= 2) {
        const auto last = rep.rel_residual.size() - 1;
        rep.pass = rep.rel_residual[last] < 0.10 && rep.rel_residual[last - 1] < 0.10;
    }
    return rep;
}

// --- GW covariance bounds -------------------------------------------------------------

struct GwBoundsReport {
    double k_fit = 0.0;
    double l_fit = 0.0;
    bool upper_holds = false;
    std::vector<double> seq_abs_sin;   // |sin(lambda^n t_n)| along the sequence
    std::vector<double> seq_ratio;     // E^2 / |t_n-u_n|^(H(t_n)+H(u_n))
    double min_seq_ratio = 0.0;
};

// (i) verify the incremental covariance upper bound
//     E[X_t-X_u]^2 <= K |t-u|^(H(t)+H(u)) + L (H(t)-H(u))^2
// with fitted constants over random pairs in [a,b];
// (ii) build the lower-bound sequences t_n (|sin lambda^n t_n| > 1/2) and
//      u_n = t_n + h_n with lambda^-(n+1) <= h_n <= lambda^-n, and report the
//      variance-to-power ratio along them.
inline GwBoundsReport gw_covariance_bounds_check(const GWSpec& gw, double t0, double a, double b,
                                                 std::size_t n_pairs, int n_seq,
                                                 std::uint64_t seed) {
    GwBoundsReport rep;
    CounterRng rng(seed, 0);

    // (i) fitted upper bound
    std::vector<double> pow_term(n_pairs), dh2(n_pairs), e2(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const double t = a + (b - a) * rng.next_double();
        const double u = a + (b - a) * rng.next_double();
        const double ht = evaluate(gw.h, t), hu = evaluate(gw.h, u);
        pow_term[i] = std::pow(std::abs(t - u), ht + hu);
        dh2[i] = (ht - hu) * (ht - hu);
        e2[i] = ExactVariance::gw_series(gw, t, u);
    }
    double sll = 0.0, slv = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        sll += dh2[i] * dh2[i];
        slv += dh2[i] * e2[i];
    }
    rep.l_fit = (sll > 1e-30) ? std::max(0.0, slv / sll) : 0.0;
    double k = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        if (pow_term[i] <= 0.0) continue;
        k = std::max(k, (e2[i] - rep.l_fit * dh2[i]) / pow_term[i]);
    }
    rep.k_fit = k;
    rep.upper_holds = std::isfinite(k);

    // (ii) proof sequences
    const double pi = std::numbers::pi;
    rep.min_seq_ratio = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_seq; ++n) {
        const double ln = std::pow(gw.lambda, n);
        double tn = t0 + pi / ln;
        if (std::abs(std::sin(ln * tn)) <= 0.5) tn += pi / (2.0 * ln);
        // pick h_n in [lambda^-(n+1), lambda^-n] maximizing the sin increment
        double best_h = std::pow(gw.lambda, -(n + 1));
        double best_gap = -1.0;
        for (int s = 0; s <= 64; ++s) {
            const double h = std::pow(gw.lambda, -(n + 1)) +
                             (std::pow(gw.lambda, -n) - std::pow(gw.lambda, -(n + 1))) *
                                 static_cast<double>(s) / 64.0;
            const double gap = std::abs(std::sin(ln * (tn + h)) - std::sin(ln * tn));
            if (gap > best_gap) {
                best_gap = gap;
                best_h = h;
            }
        }
        const double un = tn + best_h;
        const double ht = evaluate(gw.h, tn), hu = evaluate(gw.h, un);
        const double ratio =
            ExactVariance::gw_series(gw, tn, un) / std::pow(un - tn, ht + hu);
        rep.seq_abs_sin.push_back(std::abs(std::sin(ln * tn)));
        rep.seq_ratio.push_back(ratio);
        rep.min_seq_ratio = std::min(rep.min_seq_ratio, ratio);
    }
    return rep;
}

} // namespace microloc
