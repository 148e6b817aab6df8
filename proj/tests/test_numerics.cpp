#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "microloc/fft.hpp"
#include "microloc/quadrature.hpp"
#include "microloc/stats.hpp"

using namespace microloc;

TEST_CASE("fft round trip") {
    std::vector<std::complex<double>> a(64);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = {std::sin(0.3 * static_cast<double>(i)), std::cos(0.11 * static_cast<double>(i))};
    }
    auto b = a;
    fft_inplace(b);
    fft_inplace(b, true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(std::abs(a[i] - b[i]) < 1e-12);
    }
}

TEST_CASE("fft convolution equals direct convolution") {
    std::vector<double> a{1.0, -2.0, 0.5, 3.0, 0.25};
    std::vector<double> b{0.5, 1.5, -1.0, 2.0, 0.1, -0.7};
    const auto fast = convolve(a, b);
    REQUIRE(fast.size() == a.size() + b.size() - 1);
    for (std::size_t k = 0; k < fast.size(); ++k) {
        double direct = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (k >= i && k - i < b.size()) direct += a[i] * b[k - i];
        }
        REQUIRE(fast[k] == Catch::Approx(direct).margin(1e-10));
    }
}

TEST_CASE("adaptive simpson on closed forms") {
    REQUIRE(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
            Catch::Approx(1.0 / 3.0).margin(1e-10));
    REQUIRE(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
            Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("abs-sin tail integral against frozen Gauss-Legendre oracle") {
    // T(x) = int_x^inf v^(-p-1)|sin v| dv for p = 2.6. Reference values from
    // an independent 24-point Gauss-Legendre rule per half-period summed to
    // the 1e-18 remainder level.
    AbsSinPowerTail tail(2.6, 1.0);
    const std::pair<double, double> oracle[] = {
        {1.3, 0.16728661496175654},
        {4.0, 0.007869531026883762},
        {17.5, 0.0001415831126367105},
        {130.0, 7.841939167999249e-07},
    };
    for (const auto& [x, want] : oracle) {
        REQUIRE(tail(x) == Catch::Approx(want).epsilon(1e-6));
    }
    REQUIRE(tail.mean_abs_sin_pow() == Catch::Approx(2.0 / std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("linear fits recover slope and intercept") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 10; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(3.0 - 0.7 * static_cast<double>(i));
    }
    const auto f = fit_line(xs, ys);
    REQUIRE(f.slope == Catch::Approx(-0.7).margin(1e-12));
    REQUIRE(f.intercept == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(f.residual_norm < 1e-12);

    const auto g = fit_through_origin(xs, ys);
    REQUIRE(std::abs(g.slope + 0.7) < 0.5); // biased by the intercept, as expected
}

TEST_CASE("median") {
    REQUIRE(median({3.0, 1.0, 2.0}) == Catch::Approx(2.0));
    REQUIRE(median({4.0, 1.0, 2.0, 3.0}) == Catch::Approx(2.5));
}
