#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/estimate.hpp"
#include "microloc/fft.hpp"
#include "microloc/sampled_path.hpp"
#include "microloc/stats.hpp"

namespace microloc {

// Fractional order: eps > 0 differentiates, eps < 0 integrates. window = 0
// keeps the full history (exact Grunwald-Letnikov); a finite window trades
// memory depth for speed.
struct FracOrder {
    double eps = 0.0;
    std::size_t window = 0;
};

inline std::vector<double> grunwald_letnikov_weights(double eps, std::size_t count) {
    std::vector<double> w(count);
    w[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 - eps) / static_cast<double>(j);
    }
    return w;
}

// y_k = dt^-eps * sum_{j=0..min(k,W)} w_j x_{k-j}. The output grid equals the
// input grid; meta.burn_in marks the left-boundary samples that downstream
// estimation should skip.
inline SampledPath frac_diff(const SampledPath& path, const FracOrder& order) {
    if (!(std::abs(order.eps) < 1.0)) {
        throw ParameterError("fractional order must satisfy |eps| < 1");
    }
    const std::size_t n = path.size();
    const std::size_t window = (order.window == 0 || order.window > n) ? n : order.window;
    if (n < window || n < 2) throw ParameterError("path shorter than the scheme window");

    std::vector<double> out(n, 0.0);
    if (order.eps == 0.0) {
        out = path.values;
    } else {
        const auto w = grunwald_letnikov_weights(order.eps, window);
        if (n * window > (1u << 22)) {
            const auto conv = convolve(path.values, w);
            for (std::size_t k = 0; k < n; ++k) out[k] = conv[k];
        } else {
            for (std::size_t k = 0; k < n; ++k) {
                double s = 0.0;
                const std::size_t jmax = std::min(k, window - 1);
                for (std::size_t j = 0; j <= jmax; ++j) s += w[j] * path.values[k - j];
                out[k] = s;
            }
        }
        const double scale = std::pow(path.dt, -order.eps);
        for (auto& v : out) v *= scale;
    }

    PathMeta meta = path.meta.value_or(PathMeta{});
    meta.frac_order = order.eps + meta.frac_order.value_or(0.0);
    std::size_t burn = static_cast<std::size_t>(std::ceil(0.05 / path.dt));
    if (window < n) burn = std::max(burn, window);
    meta.burn_in = std::min(burn, n / 2);
    return make_path(path.t_start, path.dt, std::move(out), meta);
}

struct TranslationReport {
    double eps = 0.0;
    std::vector<double> s_grid;
    std::vector<double> sigma_orig;
    std::vector<double> sigma_diff;
    std::vector<double> delta;      // sigma_orig - sigma_diff, expected ~ eps
    double median_delta = 0.0;
    bool pass = false;
};

// Empirical check of the frontier-translation law: differentiating by eps
// should lower every sigma(s') by eps. Pass when the median per-s' drop lies
// in [eps - 0.15, eps + 0.15].
inline TranslationReport verify_translation(const SampledPath& path, const FracOrder& order,
                                            double t0, std::span<const double> s_grid,
                                            int n_min, int n_max) {
    const SampledPath diffed = frac_diff(path, order);
    const FrontierEstimate orig = estimate_frontier(path, t0, s_grid, n_min, n_max);
    const FrontierEstimate diff = estimate_frontier(diffed, t0, s_grid, n_min, n_max);

    TranslationReport rep;
    rep.eps = order.eps;
    rep.s_grid.assign(s_grid.begin(), s_grid.end());
    rep.sigma_orig = orig.sigma_hat;
    rep.sigma_diff = diff.sigma_hat;
    for (std::size_t i = 0; i < rep.s_grid.size(); ++i) {
        rep.delta.push_back(orig.sigma_hat[i] - diff.sigma_hat[i]);
    }
    rep.median_delta = median(rep.delta);
    rep.pass = rep.median_delta >= order.eps - 0.15 && rep.median_delta <= order.eps + 0.15;
    return rep;
}

} // namespace microloc
