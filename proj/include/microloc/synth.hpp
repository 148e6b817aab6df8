#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/fft.hpp"
#include "microloc/function_spec.hpp"
#include "microloc/process_spec.hpp"
#include "microloc/rng.hpp"
#include "microloc/sampled_path.hpp"

namespace microloc {

// --- fractional Brownian motion ----------------------------------------------

namespace detail {

// Davies-Harte circulant embedding of the fGn covariance. Returns the
// eigenvalue vector (FFT of the embedded first row), or an empty vector when
// some eigenvalue is below -tol and the embedding is unusable.
inline std::vector<double> fgn_circulant_eigenvalues(double hurst, std::size_t n_increments,
                                                     double tol = 1e-10) {
    // pad the embedding to a power of two for the radix-2 transform
    const std::size_t m = next_pow2(2 * n_increments);
    std::vector<std::complex<double>> row(m);
    auto fgn_cov = [&](double k) {
        return 0.5 * (std::pow(std::abs(k - 1.0), 2.0 * hurst) +
                      std::pow(k + 1.0, 2.0 * hurst) - 2.0 * std::pow(k, 2.0 * hurst));
    };
    for (std::size_t j = 0; j <= m / 2; ++j) row[j] = fgn_cov(static_cast<double>(j));
    for (std::size_t j = m / 2 + 1; j < m; ++j) row[j] = row[m - j];
    fft_inplace(row);
    std::vector<double> eig(m);
    for (std::size_t j = 0; j < m; ++j) {
        eig[j] = row[j].real();
        if (eig[j] < -tol) return {};
        if (eig[j] < 0.0) eig[j] = 0.0;
    }
    return eig;
}

// Plain Cholesky on the fBm covariance, used only when the embedding fails.
inline std::vector<double> fbm_values_by_cholesky(double hurst, std::size_t n, double dt,
                                                  CounterRng& rng) {
    const std::size_t m = n - 1; // values at t_1..t_{n-1}; B_0 = 0
    auto cov = [&](std::size_t i, std::size_t j) {
        const double ti = static_cast<double>(i + 1) * dt;
        const double tj = static_cast<double>(j + 1) * dt;
        return 0.5 * (std::pow(ti, 2.0 * hurst) + std::pow(tj, 2.0 * hurst) -
                      std::pow(std::abs(ti - tj), 2.0 * hurst));
    };
    std::vector<double> L(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = cov(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L[i * m + k] * L[j * m + k];
            if (i == j) {
                L[i * m + i] = std::sqrt(std::max(s, 1e-18));
            } else {
                L[i * m + j] = s / L[j * m + j];
            }
        }
    }
    std::vector<double> z(m);
    for (auto& v : z) v = rng.next_gaussian();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += L[i * m + k] * z[k];
        out[i + 1] = s;
    }
    return out;
}

} // namespace detail

// Exact-in-distribution fBm draw with B_0 = 0: circulant embedding of the
// increment covariance (O(n log n)), dense Cholesky fallback if the embedding
// has negative eigenvalues (flagged in meta).
inline SampledPath synth_fbm(double hurst, std::size_t n, double dt, std::uint64_t seed,
                             std::uint64_t stream = 0) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("synth_fbm requires H in (0,1)");
    if (n < 2) throw ParameterError("synth_fbm requires n >= 2");
    if (!(dt > 0.0)) throw ParameterError("synth_fbm requires dt > 0");

    CounterRng rng(seed, stream);
    PathMeta meta;
    meta.spec = FBmSpec{hurst};
    meta.seed = seed;

    const std::size_t n_inc = n - 1;
    std::vector<double> values;
    const auto eig = detail::fgn_circulant_eigenvalues(hurst, n_inc);
    if (eig.empty()) {
        values = detail::fbm_values_by_cholesky(hurst, n, dt, rng);
        meta.cholesky_fallback = true;
    } else {
        const std::size_t m = eig.size();
        std::vector<std::complex<double>> spec(m);
        const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(m));
        spec[0] = std::sqrt(eig[0] * 2.0) * scale * rng.next_gaussian();
        for (std::size_t j = 1; j < m / 2; ++j) {
            const double a = rng.next_gaussian();
            const double b = rng.next_gaussian();
            const double r = std::sqrt(eig[j]) * scale;
            spec[j] = std::complex<double>(r * a, r * b);
            spec[m - j] = std::conj(spec[j]);
        }
        spec[m / 2] = std::sqrt(eig[m / 2] * 2.0) * scale * rng.next_gaussian();
        fft_inplace(spec);
        // unit-lag fGn scaled to step dt, then cumulated
        const double step_scale = std::pow(dt, hurst);
        values.assign(n, 0.0);
        for (std::size_t k = 1; k < n; ++k) {
            values[k] = values[k - 1] + step_scale * spec[k - 1].real();
        }
    }
    return make_path(0.0, dt, std::move(values), meta);
}

// --- multifractional Brownian motion ------------------------------------------

struct MbmOptions {
    double t_trunc = 8.0;         // width of the finely discretized kernel support below 0
    double level_spacing = 0.03;  // Hurst grid spacing for the level decomposition
    double far_cut = 1e12;        // kernel tail kept via cubic-in-t moments up to here
    int far_nodes = 480;          // log-spaced noise nodes in the far tail
};

namespace detail {

struct FarTail {
    // sum_j coef_k(|u_j|) * sqrt(du_j) * Z_j for the three leading t-powers
    double a = 0.0, b = 0.0, c = 0.0;
};

// Kernel difference (t+|u|)^e - |u|^e for far-left noise (u <= -t_trunc),
// expanded to third order in t/|u|. Collapses the tail to a random cubic in
// t, exact to ~(t/t_trunc)^4 relative.
inline FarTail far_tail_coeffs(double e, const std::vector<double>& nodes,
                               const std::vector<double>& widths,
                               const std::vector<double>& noise) {
    FarTail ft;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double u = nodes[j];
        const double w = std::sqrt(widths[j]) * noise[j];
        ft.a += e * std::pow(u, e - 1.0) * w;
        ft.b += e * (e - 1.0) * 0.5 * std::pow(u, e - 2.0) * w;
        ft.c += e * (e - 1.0) * (e - 2.0) / 6.0 * std::pow(u, e - 3.0) * w;
    }
    return ft;
}

} // namespace detail

// Moving-average mBm with the one-sided kernel
//   X_t = int_-inf^t ((t-u)^(H(t)-1/2) - ((-u)+)^(H(t)-1/2)) W(du),
// discretized against one shared white-noise draw. (The two-sided
// |t-u|^e - |u|^e variant is degenerate at H = 1/2; the one-sided kernel is
// standard Brownian motion there.) The time-varying exponent is handled by
// evaluating the fixed-H field on a grid of Hurst levels (one FFT convolution
// each) and interpolating across levels at H(t_k). Kernel mass below
// -t_trunc is kept through a cubic-in-t expansion over log-spaced noise
// nodes, so the truncation design target holds without a huge grid.
inline SampledPath synth_mbm(const ScalarFunctionSpec& h, std::size_t n, double dt,
                             std::uint64_t seed, std::uint64_t stream = 0,
                             const MbmOptions& opt = {}) {
    validate(h);
    if (n < 2) throw ParameterError("synth_mbm requires n >= 2");
    if (!(dt > 0.0)) throw ParameterError("synth_mbm requires dt > 0");

    std::vector<double> hurst(n);
    double h_lo = 1.0, h_hi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        hurst[k] = evaluate(h, static_cast<double>(k) * dt);
        if (!(hurst[k] > 0.0 && hurst[k] < 1.0))
            throw ParameterError("mBm H function must map the grid into (0,1)");
        h_lo = std::min(h_lo, hurst[k]);
        h_hi = std::max(h_hi, hurst[k]);
    }

    // Hurst levels bracketing the observed range
    std::vector<double> levels;
    if (h_hi - h_lo < 1e-12) {
        levels = {h_lo};
    } else {
        const double lo = std::max(0.005, h_lo - 0.01);
        const double hi = std::min(0.995, h_hi + 0.01);
        const int count =
            std::max(4, static_cast<int>(std::ceil((hi - lo) / opt.level_spacing)) + 1);
        for (int l = 0; l < count; ++l) {
            levels.push_back(lo + (hi - lo) * static_cast<double>(l) / (count - 1));
        }
    }

    const auto m_left = static_cast<std::size_t>(std::ceil(opt.t_trunc / dt));
    const std::size_t m_total = n + m_left; // u grid covers [-t_trunc, t_end]

    // one white-noise realization shared by every level
    CounterRng rng(seed, stream);
    std::vector<double> noise(m_total);
    for (auto& z : noise) z = rng.next_gaussian();

    // far-tail noise below -t_trunc, log-spaced nodes
    std::vector<double> far_nodes, far_widths;
    {
        const int fn = opt.far_nodes;
        const double ratio = std::pow(opt.far_cut / opt.t_trunc, 1.0 / fn);
        double lo = opt.t_trunc;
        for (int j = 0; j < fn; ++j) {
            const double hi2 = lo * ratio;
            far_nodes.push_back(0.5 * (lo + hi2));
            far_widths.push_back(hi2 - lo);
            lo = hi2;
        }
    }
    std::vector<double> far_noise(far_nodes.size());
    for (auto& z : far_noise) z = rng.next_gaussian();

    const double sqrt_dt = std::sqrt(dt);

    // noise FFT, reused by every level; the causal kernel is indexed by
    // offset + (n - 1) with offsets k - i + m_left in [1-n, n-1+m_left]
    const std::size_t kern_len = 2 * n - 1 + m_left;
    const std::size_t fft_n = next_pow2(m_total + kern_len - 1);
    std::vector<std::complex<double>> noise_f(fft_n);
    for (std::size_t i = 0; i < m_total; ++i) noise_f[i] = noise[i];
    fft_inplace(noise_f);

    std::vector<std::vector<double>> level_field(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const double e = levels[l] - 0.5;
        // causal kernel with L2-matched cells, sqrt((1/dt) int_cell v_+^2e dv):
        // preserves the fresh-noise variance of the integrable singularity at
        // v = 0 exactly, which keeps small-lag increment variances faithful
        auto cell_l2 = [&](double off) {
            if (off <= -0.5) return 0.0;
            const double hi = std::pow((off + 0.5) * dt, 2.0 * e + 1.0);
            const double lo = off > 0.5 ? std::pow((off - 0.5) * dt, 2.0 * e + 1.0) : 0.0;
            return std::sqrt((hi - lo) / ((2.0 * e + 1.0) * dt));
        };
        std::vector<std::complex<double>> kern_f(fft_n);
        for (std::size_t j = 0; j < kern_len; ++j) {
            kern_f[j] = cell_l2(static_cast<double>(j) - static_cast<double>(n - 1));
        }
        fft_inplace(kern_f);
        for (std::size_t i = 0; i < fft_n; ++i) kern_f[i] *= noise_f[i];
        fft_inplace(kern_f, true);

        // counterterm sum_{u_i <= 0} (-u_i)^e sqrt(dt) Z_i, same cell averages
        double counter = 0.0;
        for (std::size_t i = 0; i <= m_left; ++i) {
            counter += cell_l2(static_cast<double>(m_left) - static_cast<double>(i)) * noise[i];
        }
        counter *= sqrt_dt;

        const auto far = detail::far_tail_coeffs(e, far_nodes, far_widths, far_noise);

        auto& field = level_field[l];
        field.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) * dt;
            // conv index: sum_i noise[i] * kern(k - i + m_left), kern shifted by n-1
            const std::size_t idx = k + m_left + (n - 1);
            double x = kern_f[idx].real() * sqrt_dt - counter;
            x += far.a * t + far.b * t * t + far.c * t * t * t;
            field[k] = x;
        }
    }

    // interpolate across levels at H(t_k)
    std::vector<double> values(n);
    if (levels.size() == 1) {
        values = std::move(level_field[0]);
    } else {
        const std::size_t L = levels.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double hk = hurst[k];
            std::size_t j = 0;
            while (j + 1 < L && levels[j + 1] < hk) ++j;
            // Lagrange on up to 4 nearest levels
            const std::size_t first = (j == 0) ? 0 : std::min(j - 1, L - 4);
            const std::size_t count = std::min<std::size_t>(4, L);
            double acc = 0.0;
            for (std::size_t p = 0; p < count; ++p) {
                double w = 1.0;
                for (std::size_t q = 0; q < count; ++q) {
                    if (q == p) continue;
                    w *= (hk - levels[first + q]) / (levels[first + p] - levels[first + q]);
                }
                acc += w * level_field[first + p][k];
            }
            values[k] = acc;
        }
    }

    PathMeta meta;
    meta.spec = MBmSpec{h};
    meta.seed = seed;
    return make_path(0.0, dt, std::move(values), meta);
}

// --- generalized Weierstrass function -----------------------------------------

inline int gw_min_depth(double h_min, double lambda, double tol = 1e-9) {
    return static_cast<int>(std::ceil(-std::log(tol) / (h_min * std::log(lambda))));
}

// X_t = sum_{j=1..depth} Z_j lambda^{-j h(t)} sin(lambda^j t)
inline SampledPath synth_gw(const ScalarFunctionSpec& h, double lambda, int depth, std::size_t n,
                            double dt, std::uint64_t seed, std::uint64_t stream = 0,
                            double tol = 1e-9) {
    validate(h);
    if (!(lambda >= 2.0)) throw ParameterError("synth_gw requires lambda >= 2");
    if (n < 2) throw ParameterError("synth_gw requires n >= 2");
    if (!(dt > 0.0)) throw ParameterError("synth_gw requires dt > 0");

    double h_min = 1.0;
    std::vector<double> hk(n);
    for (std::size_t k = 0; k < n; ++k) {
        hk[k] = evaluate(h, static_cast<double>(k) * dt);
        if (!(hk[k] > 0.0 && hk[k] < 1.0))
            throw ParameterError("GW H function must map the grid into (0,1)");
        h_min = std::min(h_min, hk[k]);
    }
    if (std::pow(lambda, -static_cast<double>(depth) * h_min) > tol) {
        throw ParameterError("GW depth too small for truncation tolerance; need depth >= " +
                             std::to_string(gw_min_depth(h_min, lambda, tol)));
    }

    CounterRng rng(seed, stream);
    std::vector<double> z(static_cast<std::size_t>(depth));
    for (auto& v : z) v = rng.next_gaussian();

    const double log_lambda = std::log(lambda);
    std::vector<double> values(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        double s = 0.0;
        for (int j = 1; j <= depth; ++j) {
            const double lj = std::exp(static_cast<double>(j) * log_lambda);
            s += z[static_cast<std::size_t>(j - 1)] * std::exp(-static_cast<double>(j) * hk[k] * log_lambda) *
                 std::sin(lj * t);
        }
        values[k] = s;
    }

    PathMeta meta;
    meta.spec = GWSpec{h, lambda, depth};
    meta.seed = seed;
    return make_path(0.0, dt, std::move(values), meta);
}

// --- Wiener and stable integrals ----------------------------------------------

// Left-point Ito sum of eta against Brownian increments plus the drift psi.
inline SampledPath synth_wiener_integral(const ScalarFunctionSpec& eta,
                                         const ScalarFunctionSpec& psi, std::size_t n, double dt,
                                         std::uint64_t seed, std::uint64_t stream = 0) {
    validate(eta);
    validate(psi);
    if (n < 2) throw ParameterError("synth_wiener_integral requires n >= 2");
    if (!(dt > 0.0)) throw ParameterError("synth_wiener_integral requires dt > 0");

    CounterRng rng(seed, stream);
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> values(n);
    double acc = 0.0;
    values[0] = evaluate(psi, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double t_left = static_cast<double>(k - 1) * dt;
        acc += evaluate(eta, t_left) * sqrt_dt * rng.next_gaussian();
        values[k] = acc + evaluate(psi, static_cast<double>(k) * dt);
    }

    PathMeta meta;
    meta.spec = WienerIntegralSpec{eta, psi};
    meta.seed = seed;
    return make_path(0.0, dt, std::move(values), meta);
}

// Left-point sum of eta against symmetric alpha-stable increments, scaled by
// dt^(1/alpha).
inline SampledPath synth_stable_integral(const ScalarFunctionSpec& eta, double alpha,
                                         std::size_t n, double dt, std::uint64_t seed,
                                         std::uint64_t stream = 0) {
    validate(eta);
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParameterError("synth_stable_integral requires alpha in (0,2)");
    if (alpha == 1.0)
        throw ParameterError("alpha = 1 stable integrals are not supported (skewness subtlety)");
    if (n < 2) throw ParameterError("synth_stable_integral requires n >= 2");
    if (!(dt > 0.0)) throw ParameterError("synth_stable_integral requires dt > 0");

    CounterRng rng(seed, stream);
    const double step = std::pow(dt, 1.0 / alpha);
    std::vector<double> values(n, 0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double t_left = static_cast<double>(k - 1) * dt;
        acc += evaluate(eta, t_left) * step * rng.next_stable(alpha);
        values[k] = acc;
    }

    PathMeta meta;
    meta.spec = StableIntegralSpec{eta, alpha};
    meta.seed = seed;
    return make_path(0.0, dt, std::move(values), meta);
}

// Dispatch on a ProcessSpec; stream selects the ensemble member.
inline SampledPath synthesize(const ProcessSpec& spec, std::size_t n, double dt,
                              std::uint64_t seed, std::uint64_t stream = 0) {
    validate(spec);
    struct V {
        std::size_t n;
        double dt;
        std::uint64_t seed, stream;
        SampledPath operator()(const FBmSpec& s) const {
            return synth_fbm(s.hurst, n, dt, seed, stream);
        }
        SampledPath operator()(const MBmSpec& s) const {
            return synth_mbm(s.h, n, dt, seed, stream);
        }
        SampledPath operator()(const GWSpec& s) const {
            return synth_gw(s.h, s.lambda, s.depth, n, dt, seed, stream);
        }
        SampledPath operator()(const WienerIntegralSpec& s) const {
            return synth_wiener_integral(s.eta, s.psi, n, dt, seed, stream);
        }
        SampledPath operator()(const StableIntegralSpec& s) const {
            return synth_stable_integral(s.eta, s.alpha, n, dt, seed, stream);
        }
    };
    return std::visit(V{n, dt, seed, stream}, spec);
}

} // namespace microloc
