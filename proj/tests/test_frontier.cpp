#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "microloc/frontier.hpp"
#include "microloc/rng.hpp"

using namespace microloc;

namespace {

// random frontier built from the closed-form constructors, for property tests
Frontier random_frontier(CounterRng& rng, int depth = 2) {
    const double pick = rng.next_double();
    if (depth > 0 && pick < 0.25) {
        return min_frontier(random_frontier(rng, depth - 1), random_frontier(rng, depth - 1));
    }
    if (depth > 0 && pick < 0.4) {
        const double eps = -0.3 + 0.6 * rng.next_double();
        return translate_frontier(random_frontier(rng, depth - 1), eps);
    }
    if (pick < 0.6) return power_frontier(0.05 + 1.5 * rng.next_double());
    if (pick < 0.8) return chirp_frontier(0.05 + 1.5 * rng.next_double(),
                                          0.05 + 3.0 * rng.next_double());
    return fbm_frontier(0.05 + 0.9 * rng.next_double());
}

void require_frontier_invariants(const Frontier& f) {
    if (f.is_infinite()) return;
    const auto& pts = f.breakpoints();
    REQUIRE(pts.size() >= 2);
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        REQUIRE(pts[i].s_prime > pts[i - 1].s_prime);
        const double sl = (pts[i].sigma - pts[i - 1].sigma) / (pts[i].s_prime - pts[i - 1].s_prime);
        REQUIRE(sl >= -1e-9);
        REQUIRE(sl <= 1.0 + 1e-9);
        REQUIRE(sl <= prev_slope + 1e-9); // concavity
        prev_slope = sl;
    }
}

} // namespace

TEST_CASE("power frontier closed form") {
    const Frontier f = power_frontier(1.0);
    REQUIRE(f(-0.5) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(f(-1.0) == Catch::Approx(0.0).margin(1e-14));

    const Frontier g = power_frontier(0.3);
    REQUIRE(pointwise_exponent(g) == Catch::Approx(0.3).margin(1e-13));
    REQUIRE(local_exponent(g) == Catch::Approx(0.3).margin(1e-14));

    const Frontier shifted = translate_frontier(power_frontier(0.5), 0.2);
    REQUIRE(shifted.almost_equal(power_frontier(0.3)));
}

TEST_CASE("chirp frontier closed form") {
    const Frontier f = chirp_frontier(1.0, 1.0);
    REQUIRE(f(0.0) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(f(-1.0) == Catch::Approx(0.0).margin(1e-14));
    for (double sp : {-0.9, -0.4, -0.1}) {
        REQUIRE(f(sp) == Catch::Approx(0.5 * sp + 0.5).margin(1e-14));
    }

    // beta -> 0 degenerates to the slope-1 power line
    const Frontier g = chirp_frontier(0.5, 1e-9);
    REQUIRE(local_exponent(g) == Catch::Approx(0.5).epsilon(1e-8));
    REQUIRE(pointwise_exponent(g) == Catch::Approx(0.5).epsilon(1e-8));

    const Frontier h = chirp_frontier(0.7, 1.0);
    REQUIRE(pointwise_exponent(h) == Catch::Approx(0.7).margin(1e-13));
    REQUIRE(local_exponent(h) == Catch::Approx(0.35).margin(1e-14));
}

TEST_CASE("weierstrass frontier closed form") {
    const Frontier f = weierstrass_frontier(0.5);
    REQUIRE(f(-0.2) == Catch::Approx(0.3).margin(1e-14));
    REQUIRE(local_exponent(f) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(pointwise_exponent(f) == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(f.almost_equal(power_frontier(0.5)));
}

TEST_CASE("fbm frontier closed form") {
    const Frontier f = fbm_frontier(0.5);
    for (double sp : {-1.0, -0.5, 0.0}) {
        REQUIRE(f(sp) == Catch::Approx(0.5 + sp).margin(1e-14));
    }
    REQUIRE(pointwise_exponent(f) == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(local_exponent(f) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(fbm_frontier(0.3)(-0.3) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("min frontier kink") {
    // 0.5 + s' meets (s' + 0.7)/2 where 0.5 + s' = 0.35 + s'/2
    const double kink = 2.0 * (0.35 - 0.5);
    REQUIRE(kink == Catch::Approx(-0.3));
    const Frontier m = min_frontier(fbm_frontier(0.5), chirp_frontier(0.7, 1.0));
    REQUIRE(m(kink) == Catch::Approx(0.2).margin(1e-13));
    bool has_kink = false;
    for (const auto& p : m.breakpoints()) {
        if (std::abs(p.s_prime - kink) < 1e-12) has_kink = true;
    }
    REQUIRE(has_kink);

    const Frontier f = chirp_frontier(0.9, 0.7);
    REQUIRE(min_frontier(f, f).almost_equal(f));
    REQUIRE(min_frontier(f, Frontier::infinite()).almost_equal(f));
    REQUIRE(min_frontier(Frontier::infinite(), f).almost_equal(f));
}

TEST_CASE("mbm frontier regimes") {
    // a < gamma/(delta+1): the fBm line wins everywhere on [-1,0]
    const Frontier low = mbm_frontier(0.3, chirp_frontier(0.8, 1.0));
    REQUIRE(low.almost_equal(Frontier::line(0.3, 1.0)));

    // a > gamma: the H-function frontier wins on the positive-sigma part
    const Frontier high = mbm_frontier(0.72, chirp_frontier(0.7, 1.0));
    const Frontier chirp = chirp_frontier(0.7, 1.0);
    for (double sp : {-0.69, -0.4, -0.1, 0.0}) {
        REQUIRE(high(sp) == Catch::Approx(chirp(sp)).margin(1e-13));
    }

    // intermediate: two segments, kink at -0.3
    const Frontier mid = mbm_frontier(0.5, chirp_frontier(0.7, 1.0));
    REQUIRE(pointwise_exponent(mid) == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(local_exponent(mid) == Catch::Approx(0.35).margin(1e-14));
    REQUIRE(mid(-0.3) == Catch::Approx(0.2).margin(1e-13));

    // regular mBm: H-frontier strictly above the line
    const Frontier reg = mbm_frontier(0.4, power_frontier(0.9));
    REQUIRE(reg.almost_equal(Frontier::line(0.4, 1.0)));
}

TEST_CASE("wiener frontier composition") {
    // unit kernel: phi(t) = t, pseudo-frontier 1 + s', result is the Brownian line
    const Frontier phi = wiener_phi_pseudo_frontier(ConstantFn{1.0}, 0.5);
    const Frontier bm = wiener_frontier(phi, Frontier::infinite());
    REQUIRE(bm.almost_equal(fbm_frontier(0.5)));

    // sqrt-chirp kernel with the oscillation-cancelling primitive frontier
    // (chirp line + 1) as input: result = s'/(d+1) + g/(2d+2) + 1/2
    const double g = 0.3, d = 0.5;
    const Frontier phi_line = translate_frontier(chirp_frontier(g, d), -1.0);
    const Frontier w = wiener_frontier(phi_line, Frontier::infinite());
    for (double sp : {-1.0, -0.6, -0.3, 0.0}) {
        REQUIRE(w(sp) ==
                Catch::Approx(sp / (d + 1.0) + g / (2.0 * d + 2.0) + 0.5).margin(1e-13));
    }
    REQUIRE(pointwise_exponent(w) == Catch::Approx(0.9).margin(1e-13));
    REQUIRE(local_exponent(w) == Catch::Approx(0.6).margin(1e-14));

    // a drift can only lower the frontier
    const Frontier with_drift = wiener_frontier(phi_line, power_frontier(0.4));
    for (double sp : {-1.0, -0.5, 0.0}) {
        REQUIRE(with_drift(sp) <= std::min(w(sp), power_frontier(0.4)(sp)) + 1e-13);
    }
}

TEST_CASE("stable lower bound frontier") {
    const double g = 0.6, d = 1.0, alpha = 1.5;
    const Frontier phi_line = translate_frontier(chirp_frontier(g, d), -1.0);
    const auto bound = stable_lower_bound_frontier(phi_line, alpha);
    REQUIRE_FALSE(bound.slope_clamped);
    for (double sp : {-1.0, -0.4, 0.0}) {
        REQUIRE(bound.frontier(sp) ==
                Catch::Approx(sp / (d + 1.0) + g / (alpha * (d + 1.0))).margin(1e-13));
    }
    REQUIRE(bound.frontier(0.0) == Catch::Approx(0.2).margin(1e-14));

    // alpha = 1 is plain substitution phi(s') - 1
    const auto unit = stable_lower_bound_frontier(phi_line, 1.0);
    for (double sp : {-0.8, -0.2, 0.0}) {
        REQUIRE(unit.frontier(sp) == Catch::Approx(phi_line(sp) - 1.0).margin(1e-13));
    }
}

TEST_CASE("pointwise exponent conventions") {
    REQUIRE(pointwise_exponent(chirp_frontier(1.0, 1.0)) == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(std::isinf(pointwise_exponent(Frontier::infinite())));
    // flat strictly-positive frontier: +inf by the convention
    const Frontier flat = Frontier::line(0.25, 0.0);
    REQUIRE(std::isinf(pointwise_exponent(flat)));
    // already negative at zero: reported as 0 (outside region D)
    const Frontier neg = translate_frontier(fbm_frontier(0.3), 0.5);
    REQUIRE(pointwise_exponent(neg) == 0.0);
}

TEST_CASE("translation law") {
    const Frontier f = translate_frontier(fbm_frontier(0.5), 0.2);
    REQUIRE(f.almost_equal(Frontier::line(0.3, 1.0)));
    REQUIRE(pointwise_exponent(f) == Catch::Approx(0.3).margin(1e-13));

    // chirp: a drop of eps(1+beta) in the pointwise exponent
    const Frontier c = translate_frontier(chirp_frontier(1.0, 1.0), 0.2);
    REQUIRE(pointwise_exponent(c) == Catch::Approx(1.0 - 0.2 * 2.0).margin(1e-13));

    // intermediate mBm case: drop eps below the kink ordinate, then steeper
    const Frontier mid = mbm_frontier(0.5, chirp_frontier(0.7, 1.0));
    REQUIRE(pointwise_exponent(translate_frontier(mid, 0.1)) ==
            Catch::Approx(0.4).margin(1e-13));
    const double drop_deep = 0.2 + (0.3 - 0.2) * 2.0; // (gamma-a)/delta + (eps - ...)(1+delta)
    REQUIRE(pointwise_exponent(translate_frontier(mid, 0.3)) ==
            Catch::Approx(0.5 - drop_deep).margin(1e-13));
}

TEST_CASE("region D clipping") {
    const auto fbm_clip = clip_to_region_d(fbm_frontier(0.5));
    REQUIRE(fbm_clip.intersects);
    REQUIRE(fbm_clip.frontier(-0.25) == Catch::Approx(0.25).margin(1e-12));

    REQUIRE_FALSE(clip_to_region_d(power_frontier(1.8)).intersects);

    const Frontier zero_top = translate_frontier(chirp_frontier(0.5, 1.0), 0.25);
    REQUIRE(zero_top(0.0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE_FALSE(clip_to_region_d(zero_top).intersects);

    REQUIRE_FALSE(clip_to_region_d(Frontier::infinite()).intersects);
}

TEST_CASE("regularity report") {
    const auto r1 = report(fbm_frontier(0.5));
    REQUIRE(r1.pointwise == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(r1.local == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(r1.in_region_d);

    const auto r2 = report(chirp_frontier(1.0, 1.0));
    REQUIRE(r2.pointwise == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(r2.local == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(r2.in_region_d);

    const auto r3 = report(mbm_frontier(0.5, chirp_frontier(0.7, 1.0)));
    REQUIRE(r3.pointwise == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(r3.local == Catch::Approx(0.35).margin(1e-13));
    REQUIRE(r3.in_region_d);
}

TEST_CASE("frontier properties over randomized cases") {
    CounterRng rng(2026, 0);
    for (int iter = 0; iter < 1000; ++iter) {
        const Frontier a = random_frontier(rng);
        const Frontier b = random_frontier(rng);
        const Frontier c = random_frontier(rng);
        require_frontier_invariants(a);

        const Frontier ab = min_frontier(a, b);
        require_frontier_invariants(ab);
        REQUIRE(ab.almost_equal(min_frontier(b, a), 1e-9));
        REQUIRE(min_frontier(a, a).almost_equal(a, 1e-9));
        REQUIRE(min_frontier(ab, c).almost_equal(min_frontier(a, min_frontier(b, c)), 1e-9));

        if (!a.is_infinite() && !b.is_infinite()) {
            for (int i = 0; i <= 100; ++i) {
                const double sp = -1.0 + static_cast<double>(i) / 100.0;
                REQUIRE(ab(sp) <= std::min(a(sp), b(sp)) + 1e-9);
            }
        }

        if (!a.is_infinite()) {
            const double eps = -0.4 + 0.8 * rng.next_double();
            const Frontier back = translate_frontier(translate_frontier(a, eps), -eps);
            const auto& p0 = a.breakpoints();
            const auto& p1 = back.breakpoints();
            REQUIRE(p0.size() == p1.size());
            for (std::size_t i = 0; i < p0.size(); ++i) {
                REQUIRE(p0[i].s_prime == p1[i].s_prime);
                REQUIRE(p0[i].sigma == Catch::Approx(p1[i].sigma).margin(1e-12));
            }

            // local <= pointwise, and the frontier-level sandwich. The upper
            // half is a theorem only where sigma(s') >= 0; below the axis a
            // slope-<1 curve extended past its zero crossing can exceed it.
            const double pw = pointwise_exponent(a);
            const double loc = local_exponent(a);
            REQUIRE(loc <= pw + 1e-9);
            for (int i = 0; i <= 20; ++i) {
                const double sp = -1.0 + static_cast<double>(i) / 20.0;
                REQUIRE(loc <= a(sp) - sp + 1e-9);
                if (a(sp) >= 0.0) {
                    REQUIRE(a(sp) - sp <= pw + 1e-9);
                }
            }

            // slope-1 lines lose exactly eps of pointwise exponent
            if (std::abs(a.slope_left() - 1.0) < 1e-12 &&
                std::abs(a.slope_right() - 1.0) < 1e-12 && pointwise_exponent(a) < 10.0) {
                const double shift = 0.1;
                const Frontier t = translate_frontier(a, shift);
                if (t(0.0) >= 0.0) {
                    REQUIRE(pointwise_exponent(t) ==
                            Catch::Approx(pointwise_exponent(a) - shift).margin(1e-9));
                }
            }
        }
    }
}
