#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/sampled_path.hpp"

namespace microloc {

// Closed ball in time, snapped outward to the grid; both endpoints included
// on exact hits.
struct BallIndices {
    std::size_t first = 0;
    std::size_t last = 0; // inclusive
    std::size_t count() const { return last - first + 1; }
};

inline BallIndices ball_indices(const SampledPath& path, double t0, double rho) {
    const double lo = (t0 - rho - path.t_start) / path.dt;
    const double hi = (t0 + rho - path.t_start) / path.dt;
    const auto n = static_cast<double>(path.size() - 1);
    const double f = std::clamp(std::floor(lo), 0.0, n);
    const double l = std::clamp(std::ceil(hi), 0.0, n);
    return {static_cast<std::size_t>(f), static_cast<std::size_t>(l)};
}

// sup |X_t - X_u| over the grid points of B(t0, rho), i.e. max - min.
inline double oscillation(const SampledPath& path, double t0, double rho) {
    if (!(rho > 0.0)) throw ParameterError("oscillation requires rho > 0");
    if (t0 < path.t_start || t0 > path.t_end())
        throw ParameterError("t0 outside the path domain");
    const BallIndices b = ball_indices(path, t0, rho);
    if (b.count() < 2) {
        throw ResolutionError("ball B(t0, rho) contains fewer than 2 samples");
    }
    double mn = path.values[b.first], mx = mn;
    for (std::size_t k = b.first + 1; k <= b.last; ++k) {
        mn = std::min(mn, path.values[k]);
        mx = std::max(mx, path.values[k]);
    }
    return mx - mn;
}

// Dyadic oscillation table: M(n,m) is the max of |X_t - X_u| over adjacent
// points of the grid {t0 + k 2^-(m+n), |k| <= 2^m} (ball radius 2^-n,
// spacing 2^-(m+n)), snapped to the sample grid. Spacings below 4*dt are
// excluded to stay off the resolution floor.
class OscillationPyramid {
public:
    struct Cell {
        double value = 0.0;       // max adjacent-pair increment, 0 if no pairs
        double sum_sq = 0.0;      // sum of squared pair increments
        std::size_t pair_count = 0;

        double rms() const {
            return pair_count ? std::sqrt(sum_sq / static_cast<double>(pair_count)) : 0.0;
        }
    };

    OscillationPyramid(const SampledPath& path, double t0, int n_min, int n_max)
        : t0_(t0), n_min_(n_min), n_max_(n_max) {
        if (n_min < 0 || n_max < n_min) throw ParameterError("invalid pyramid scale range");
        if (t0 < path.t_start || t0 > path.t_end())
            throw ParameterError("t0 outside the path domain");
        // spacings down to 2^-(m+n) >= ~4 dt; rounded so an (n-1)-step range
        // still grants the full dyadic depth
        const int j_floor =
            static_cast<int>(std::llround(std::log2(path.range() / path.dt))) - 2;
        rows_.resize(static_cast<std::size_t>(n_max - n_min + 1));
        for (int n = n_min; n <= n_max; ++n) {
            const int m_max = j_floor - n;
            if (m_max < 0) {
                throw ResolutionError("grid too coarse for pyramid scale n = " +
                                      std::to_string(n));
            }
            auto& row = rows_[static_cast<std::size_t>(n - n_min)];
            row.resize(static_cast<std::size_t>(m_max + 1));
            for (int m = 0; m <= m_max; ++m) {
                row[static_cast<std::size_t>(m)] = compute_cell(path, n, m);
            }
        }
    }

    double t0() const { return t0_; }
    int n_min() const { return n_min_; }
    int n_max() const { return n_max_; }
    int m_max(int n) const {
        return static_cast<int>(rows_[static_cast<std::size_t>(n - n_min_)].size()) - 1;
    }
    const Cell& cell(int n, int m) const {
        return rows_[static_cast<std::size_t>(n - n_min_)][static_cast<std::size_t>(m)];
    }

private:
    Cell compute_cell(const SampledPath& path, int n, int m) const {
        const double spacing = std::pow(2.0, -(m + n));
        const auto half = static_cast<long>(1L << m);
        Cell c;
        bool have_prev = false;
        std::size_t prev_idx = 0;
        const auto last = static_cast<double>(path.size() - 1);
        for (long k = -half; k <= half; ++k) {
            const double t = t0_ + static_cast<double>(k) * spacing;
            const double x = (t - path.t_start) / path.dt;
            if (x < -0.5 || x > last + 0.5) {
                have_prev = false;
                continue;
            }
            const auto idx = static_cast<std::size_t>(std::clamp(std::round(x), 0.0, last));
            if (have_prev) {
                const double d = std::abs(path.values[idx] - path.values[prev_idx]);
                if (d > c.value) c.value = d;
                c.sum_sq += d * d;
                ++c.pair_count;
            }
            prev_idx = idx;
            have_prev = true;
        }
        return c;
    }

    double t0_;
    int n_min_, n_max_;
    std::vector<std::vector<Cell>> rows_;
};

inline OscillationPyramid build_pyramid(const SampledPath& path, double t0, int n_min,
                                        int n_max) {
    return OscillationPyramid(path, t0, n_min, n_max);
}

} // namespace microloc
