#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/oscillation.hpp"
#include "microloc/stats.hpp"

namespace microloc {

// Per-s' empirical frontier values with regression diagnostics.
struct FrontierEstimate {
    double t0 = 0.0;
    std::vector<double> s_grid;
    std::vector<double> sigma_hat;   // +inf sentinel when every cell is zero
    std::vector<double> stderr_;
    int n_min = 0, n_max = 0, m_max = 0;
    double fit_residual = 0.0;       // pooled rms envelope residual

    // Projection onto the frontier shape constraints (non-decreasing, concave,
    // slopes in [0,1]), anchored at the right endpoint. Optional post-processing.
    std::vector<double> concave_projection() const {
        std::vector<double> out = sigma_hat;
        const std::size_t n = out.size();
        if (n < 2) return out;
        for (double v : out) {
            if (!std::isfinite(v)) return out; // sentinel estimates stay as-is
        }
        std::vector<double> slopes(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dx = s_grid[i + 1] - s_grid[i];
            slopes[i] = std::clamp((out[i + 1] - out[i]) / dx, 0.0, 1.0);
        }
        // pool adjacent violators so slopes are non-increasing left to right
        std::vector<double> pooled;
        std::vector<double> weight;
        for (std::size_t i = 0; i < slopes.size(); ++i) {
            double v = slopes[slopes.size() - 1 - i]; // right to left: must be non-decreasing
            double w = 1.0;
            while (!pooled.empty() && pooled.back() > v) {
                v = (v * w + pooled.back() * weight.back()) / (w + weight.back());
                w += weight.back();
                pooled.pop_back();
                weight.pop_back();
            }
            pooled.push_back(v);
            weight.push_back(w);
        }
        std::vector<double> mono(slopes.size());
        std::size_t idx = 0;
        for (std::size_t b = 0; b < pooled.size(); ++b) {
            for (std::size_t r = 0; r < static_cast<std::size_t>(weight[b]); ++r) {
                mono[slopes.size() - 1 - idx] = pooled[b];
                ++idx;
            }
        }
        for (std::size_t i = n - 1; i > 0; --i) {
            const double dx = s_grid[i] - s_grid[i - 1];
            out[i - 1] = out[i] - mono[i - 1] * dx;
        }
        return out;
    }
};

inline int default_n_max(std::size_t n_samples) {
    return static_cast<int>(std::floor(std::log2(static_cast<double>(n_samples)))) - 6;
}

inline constexpr int kDefaultNMin = 2;

inline std::vector<double> default_s_grid() {
    std::vector<double> g;
    for (int i = -9; i <= 0; ++i) g.push_back(static_cast<double>(i) / 10.0);
    return g;
}

namespace detail {

// Gaussian-envelope normalization: the max of N comparable Gaussian
// increments runs ~ sqrt(2 ln N) above a single one. For deterministic,
// envelope-dominated cells the inflation is bounded by the cell's own
// max-to-rms ratio instead, so the corrected statistic is
//   min( -log2 max + 0.5 log2(2 ln N), -log2 rms ).
inline double cell_statistic(double max_value, double rms, std::size_t n_pairs) {
    const double n = static_cast<double>(std::max<std::size_t>(2, n_pairs));
    const double gauss = -std::log2(max_value) + 0.5 * std::log2(2.0 * std::log(n));
    return std::min(gauss, -std::log2(rms));
}

// max-smoothed over the m neighbors (limsup emulation: a single undershot
// cell must not pull a ray down).
inline double smoothed_cell_y(const OscillationPyramid& pyr, int n, int m) {
    double best = std::numeric_limits<double>::infinity();
    for (int mm = m - 1; mm <= m + 1; ++mm) {
        if (mm < 0 || mm > pyr.m_max(n)) continue;
        const auto& c = pyr.cell(n, mm);
        if (c.pair_count == 0 || c.value <= 0.0) continue;
        best = std::min(best, cell_statistic(c.value, c.rms(), c.pair_count));
    }
    return best;
}

struct RayFit {
    double slope = std::numeric_limits<double>::infinity();
    double stderr_ = 0.0;
    double residual = 0.0;
    bool empty = true;
};

// (offset, slope) families m = a + c*n scanned by the estimator. Constant-m
// families (gap proportional to the ball radius) bind for fBm-like regimes
// and for the ball-diameter pairs of chirps at deep s'; proportional rays
// bind where an oscillation scale ties the gap to a power of the radius.
struct RayDirection {
    int offset = 0;
    double slope = 0.0;
};

inline constexpr std::array<RayDirection, 11> kRayDirections = {{
    {0, 0.0},
    {1, 0.0},
    {2, 0.0},
    {3, 0.0},
    {0, 0.25},
    {0, 0.5},
    {0, 0.75},
    {0, 1.0},
    {0, 1.5},
    {0, 2.0},
    {0, 3.0},
}};

// The dyadic bound M(n,m) <= C 2^(-sigma(m+n) + s'n) turns into
// -log2 M + s'n >= sigma (m+n) - log2 C. Along a fixed family m = a + c*n
// the constant is stable, so the frontier value is the smallest family slope
// of y + s'n against m+n. Families are compared by slope + 2 stderr (the
// winner must be reliably low, not luckily low); the raw slope is reported.
template <typename CellY, typename MMax>
RayFit ray_min_fit(int n_min, int n_max, double s_prime, CellY&& cell_y, MMax&& m_max) {
    RayFit best;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& dir : kRayDirections) {
        std::vector<double> xs, ys;
        for (int n = n_min; n <= n_max; ++n) {
            const int m = dir.offset + static_cast<int>(std::lround(dir.slope * n));
            if (m > m_max(n)) continue;
            const double y = cell_y(n, m);
            if (!std::isfinite(y)) continue;
            xs.push_back(static_cast<double>(n + m));
            ys.push_back(y + s_prime * n);
        }
        if (xs.size() < 4) continue;
        const LinearFit f = fit_line(xs, ys);
        const double score = f.slope + 2.0 * f.slope_stderr;
        if (score < best_score) {
            best_score = score;
            best.slope = f.slope;
            best.stderr_ = f.slope_stderr;
            best.residual = f.residual_norm;
            best.empty = false;
        }
    }
    return best;
}

} // namespace detail

// Empirical 2-microlocal frontier from the dyadic oscillation pyramid.
inline FrontierEstimate estimate_frontier(const SampledPath& path, double t0,
                                          std::span<const double> s_grid, int n_min, int n_max) {
    if (n_max - n_min < 3) {
        throw ResolutionError("need n_max - n_min >= 3 scales, got " +
                              std::to_string(n_max - n_min));
    }
    for (double sp : s_grid) {
        if (sp < -1.0 || sp > 0.0) throw ParameterError("s_grid values must lie in [-1, 0]");
    }
    const OscillationPyramid pyr(path, t0, n_min, n_max);

    FrontierEstimate est;
    est.t0 = t0;
    est.n_min = n_min;
    est.n_max = n_max;
    est.m_max = pyr.m_max(n_min);
    est.s_grid.assign(s_grid.begin(), s_grid.end());

    double pooled = 0.0;
    std::size_t pooled_n = 0;
    for (double sp : s_grid) {
        const auto fit = detail::ray_min_fit(
            n_min, n_max, sp,
            [&](int n, int m) { return detail::smoothed_cell_y(pyr, n, m); },
            [&](int n) { return pyr.m_max(n); });
        if (fit.empty) {
            est.sigma_hat.push_back(std::numeric_limits<double>::infinity());
            est.stderr_.push_back(0.0);
        } else {
            est.sigma_hat.push_back(fit.slope);
            est.stderr_.push_back(fit.stderr_);
            pooled += fit.residual * fit.residual;
            ++pooled_n;
        }
    }
    est.fit_residual = pooled_n ? std::sqrt(pooled / static_cast<double>(pooled_n)) : 0.0;
    return est;
}

struct ExponentEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    bool saturated = false; // oscillation regressions cannot see beyond ~1

    operator double() const { return value; }
};

// Pointwise exponent: decay of the whole-ball oscillation, log2 osc(2^-n) ~ -alpha n.
inline ExponentEstimate estimate_pointwise_exponent(const SampledPath& path, double t0,
                                                    int n_min, int n_max) {
    if (n_max - n_min < 3) {
        throw ResolutionError("need n_max - n_min >= 3 scales, got " +
                              std::to_string(n_max - n_min));
    }
    std::vector<double> xs, ys;
    for (int n = n_min; n <= n_max; ++n) {
        const double osc = oscillation(path, t0, std::pow(2.0, -n));
        if (osc <= 0.0) continue;
        xs.push_back(-static_cast<double>(n));
        ys.push_back(std::log2(osc));
    }
    ExponentEstimate e;
    if (xs.size() < 2) {
        e.value = std::numeric_limits<double>::infinity();
        return e;
    }
    const LinearFit f = fit_line(xs, ys);
    e.value = f.slope;
    e.stderr_ = f.slope_stderr;
    e.saturated = f.slope >= 0.95;
    return e;
}

// Local exponent: envelope slope at s' = 0 (increment-size scaling inside
// shrinking balls).
inline ExponentEstimate estimate_local_exponent(const SampledPath& path, double t0, int n_min,
                                                int n_max) {
    const std::array<double, 1> zero{0.0};
    const FrontierEstimate est = estimate_frontier(path, t0, zero, n_min, n_max);
    ExponentEstimate e;
    e.value = est.sigma_hat[0];
    e.stderr_ = est.stderr_[0];
    e.saturated = e.value >= 0.95;
    return e;
}

struct FieldPoint {
    double t0 = 0.0;
    std::optional<FrontierEstimate> estimate;
    std::string error;
};

// Batch map of estimate_frontier over a grid of base points; per-point
// failures are reported, not thrown.
inline std::vector<FieldPoint> estimate_field(const SampledPath& path,
                                              std::span<const double> t0_grid,
                                              std::span<const double> s_grid, int n_min,
                                              int n_max) {
    std::vector<FieldPoint> out;
    out.reserve(t0_grid.size());
    for (double t0 : t0_grid) {
        FieldPoint fp;
        fp.t0 = t0;
        try {
            fp.estimate = estimate_frontier(path, t0, s_grid, n_min, n_max);
        } catch (const std::exception& ex) {
            fp.error = ex.what();
        }
        out.push_back(std::move(fp));
    }
    return out;
}

inline std::string estimate_to_csv(const FrontierEstimate& est, bool with_t0 = false) {
    std::ostringstream os;
    os << (with_t0 ? "t0,s_prime,sigma_hat,stderr\n" : "s_prime,sigma_hat,stderr\n");
    for (std::size_t i = 0; i < est.s_grid.size(); ++i) {
        if (with_t0) os << est.t0 << ",";
        os << est.s_grid[i] << "," << est.sigma_hat[i] << "," << est.stderr_[i] << "\n";
    }
    return os.str();
}

} // namespace microloc
