#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "microloc/estimate.hpp"
#include "microloc/fracdiff.hpp"
#include "microloc/parallel.hpp"
#include "microloc/stats.hpp"
#include "microloc/synth.hpp"

using namespace microloc;

TEST_CASE("grunwald-letnikov weights follow the binomial recursion") {
    const auto w = grunwald_letnikov_weights(0.4, 6);
    REQUIRE(w[0] == 1.0);
    REQUIRE(w[1] == Catch::Approx(-0.4).margin(1e-15));
    // w2 = -eps (1 - eps) / 2
    REQUIRE(w[2] == Catch::Approx(-0.4 * (1.0 - 0.4) / 2.0).margin(1e-15));
    // alternating-sign binomial series of (1-z)^eps: partial sums shrink
    double s = 0.0;
    for (double v : w) s += v;
    REQUIRE(std::abs(s) < 1.0);
}

TEST_CASE("order zero is the identity") {
    const auto p = synth_fbm(0.6, 512, 1.0 / 512.0, 5);
    const auto q = frac_diff(p, {0.0, 0});
    for (std::size_t k = 0; k < p.size(); ++k) REQUIRE(q.values[k] == p.values[k]);
}

TEST_CASE("orders outside (-1,1) are rejected") {
    const auto p = synth_fbm(0.6, 128, 1.0 / 128.0, 5);
    REQUIRE_THROWS_AS(frac_diff(p, {1.0, 0}), ParameterError);
    REQUIRE_THROWS_AS(frac_diff(p, {-1.2, 0}), ParameterError);
}

TEST_CASE("constant path decays with the GL partial sums") {
    const double c = 2.5, eps = 0.3;
    const std::size_t n = 16384;
    const double dt = 1.0 / static_cast<double>(n);
    const auto path = make_path(0.0, dt, std::vector<double>(n, c));
    const auto out = frac_diff(path, {eps, 0});

    // independent oracle: y_k = c dt^-eps sum_{j<=k} w_j, partial sums computed
    // from the recursion directly
    std::vector<double> w(n);
    w[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
        w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 - eps) / static_cast<double>(j);
    }
    double partial = 0.0;
    const double scale = c * std::pow(dt, -eps);
    double max_rel = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        partial += w[k];
        max_rel = std::max(max_rel, std::abs(out.values[k] - scale * partial) /
                                        std::max(1.0, std::abs(scale * partial)));
    }
    REQUIRE(max_rel < 1e-9);

    // the partial sums die off like k^-eps / Gamma(1-eps); past 10^4 samples
    // the output is below 5% of c dt^-eps
    REQUIRE(std::abs(out.values[n - 1]) <= 0.05 * std::abs(c) * std::pow(dt, -eps));

    // burn-in marker recorded
    REQUIRE(out.meta.has_value());
    REQUIRE(out.meta->burn_in.has_value());
}

TEST_CASE("semigroup property on a smooth signal") {
    const std::size_t n = 4096;
    const double dt = 1.0 / static_cast<double>(n);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = std::sin(2.0 * std::numbers::pi * static_cast<double>(k) * dt);
    }
    const auto x = make_path(0.0, dt, std::move(v));
    const auto a = frac_diff(frac_diff(x, {0.2, 0}), {0.3, 0});
    const auto b = frac_diff(x, {0.5, 0});
    const std::size_t burn = *a.meta->burn_in;
    double num = 0.0, den = 0.0;
    for (std::size_t k = burn; k < n; ++k) {
        num += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
        den += b.values[k] * b.values[k];
    }
    REQUIRE(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("linearity is exact") {
    const auto x = synth_fbm(0.4, 1024, 1.0 / 1024.0, 9);
    const auto y = synth_fbm(0.7, 1024, 1.0 / 1024.0, 10);
    const FracOrder order{0.35, 0};
    const auto fx = frac_diff(x, order);
    const auto fy = frac_diff(y, order);
    std::vector<double> combo(1024);
    for (std::size_t k = 0; k < 1024; ++k) combo[k] = 2.0 * x.values[k] - 0.5 * y.values[k];
    const auto fc = frac_diff(make_path(0.0, 1.0 / 1024.0, std::move(combo)), order);
    for (std::size_t k = 0; k < 1024; ++k) {
        REQUIRE(fc.values[k] ==
                Catch::Approx(2.0 * fx.values[k] - 0.5 * fy.values[k]).margin(1e-9));
    }
}

TEST_CASE("finite window equals full history when window >= n") {
    const auto x = synth_fbm(0.5, 256, 1.0 / 256.0, 11);
    const auto full = frac_diff(x, {0.25, 0});
    const auto win = frac_diff(x, {0.25, 256});
    for (std::size_t k = 0; k < 256; ++k) REQUIRE(full.values[k] == win.values[k]);
}

TEST_CASE("weierstrass local exponent drops by the differentiation order") {
    // GW h = 0.7, eps = 0.2: slope-1 frontier translates down to 0.5
    const std::size_t n = 1u << 14;
    const double dt = 1.0 / static_cast<double>(n);
    std::vector<double> locals(24);
    parallel_for(locals.size(), [&](std::size_t i) {
        const auto p = synth_gw(ConstantFn{0.7}, 2.0, 80, n, dt, 606, i);
        const auto d = frac_diff(p, {0.2, 0});
        locals[i] = estimate_local_exponent(d, 0.6, 2, default_n_max(n)).value;
    });
    REQUIRE(median(locals) == Catch::Approx(0.5).margin(0.1));
}

TEST_CASE("verify_translation on fbm") {
    const std::size_t n = 1u << 13;
    const double dt = 1.0 / static_cast<double>(n);
    const auto grid = default_s_grid();

    // eps = 0 gives an identically zero difference
    const auto base = synth_fbm(0.6, n, dt, 2222, 0);
    const auto zero = verify_translation(base, {0.0, 0}, 0.6, grid, 2, default_n_max(n));
    for (double d : zero.delta) REQUIRE(d == 0.0);
    REQUIRE(zero.pass);

    // eps = 0.2: the frontier drops by ~0.2 across s'
    std::size_t passes = 0;
    std::vector<double> med(16);
    parallel_for(med.size(), [&](std::size_t i) {
        const auto p = synth_fbm(0.6, n, dt, 2223, i);
        const auto rep = verify_translation(p, {0.2, 0}, 0.6, grid, 2, default_n_max(n));
        med[i] = rep.median_delta;
    });
    for (double m : med) {
        if (m >= 0.05 && m <= 0.35) ++passes;
    }
    REQUIRE(median(med) == Catch::Approx(0.2).margin(0.15));
    REQUIRE(passes >= 12);
}
