#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/function_spec.hpp"

namespace microloc {

struct FrontierPoint {
    double s_prime = 0.0;
    double sigma = 0.0;
};

// Piecewise-linear concave non-decreasing curve s' -> sigma(s') on [-1,0]
// with segment slopes in [0,1], extended outside the breakpoint range by its
// end slopes. Every closed form in this library is a union of at most a few
// segments, so keeping explicit breakpoints makes the theory layer exact.
//
// The everywhere-infinite frontier (constant functions) is a sentinel state:
// it is the identity of min_frontier and maps to +inf exponents.
class Frontier {
public:
    static Frontier infinite() {
        Frontier f;
        f.infinite_ = true;
        return f;
    }

    // sigma(s') = value_at_zero + slope * s' restricted to [-1,0].
    static Frontier line(double value_at_zero, double slope) {
        if (!(slope >= -kTol && slope <= 1.0 + kTol)) {
            throw ParameterError("frontier line slope must lie in [0,1]");
        }
        Frontier f;
        f.pts_ = {{-1.0, value_at_zero - slope}, {0.0, value_at_zero}};
        return f;
    }

    static Frontier from_breakpoints(std::vector<FrontierPoint> pts) {
        if (pts.size() < 2) throw ParameterError("frontier needs at least 2 breakpoints");
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (!(pts[i].s_prime > pts[i - 1].s_prime + 0.0))
                throw ParameterError("frontier breakpoint abscissae must strictly increase");
        }
        if (pts.front().s_prime < -1.0 - kTol || pts.back().s_prime > kTol)
            throw ParameterError("frontier breakpoints must lie in [-1,0]");
        // slopes in [0,1], non-increasing left to right (concavity)
        double prev_slope = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double sl =
                (pts[i].sigma - pts[i - 1].sigma) / (pts[i].s_prime - pts[i - 1].s_prime);
            if (sl < -kTol || sl > 1.0 + kTol)
                throw ParameterError("frontier slope outside [0,1]");
            if (sl > prev_slope + kTol) throw ParameterError("frontier must be concave");
            prev_slope = sl;
        }
        Frontier f;
        f.pts_ = dedupe(std::move(pts));
        return f;
    }

    bool is_infinite() const { return infinite_; }

    double operator()(double s_prime) const {
        if (infinite_) return std::numeric_limits<double>::infinity();
        if (s_prime <= pts_.front().s_prime)
            return pts_.front().sigma + slope_left() * (s_prime - pts_.front().s_prime);
        if (s_prime >= pts_.back().s_prime)
            return pts_.back().sigma + slope_right() * (s_prime - pts_.back().s_prime);
        auto it = std::upper_bound(pts_.begin(), pts_.end(), s_prime,
                                   [](double v, const FrontierPoint& p) { return v < p.s_prime; });
        const FrontierPoint& hi = *it;
        const FrontierPoint& lo = *(it - 1);
        const double w = (s_prime - lo.s_prime) / (hi.s_prime - lo.s_prime);
        return lo.sigma + w * (hi.sigma - lo.sigma);
    }

    const std::vector<FrontierPoint>& breakpoints() const { return pts_; }

    double slope_left() const {
        return segment_slope(0);
    }
    double slope_right() const {
        return segment_slope(pts_.size() - 2);
    }

    bool almost_equal(const Frontier& other, double tol = 1e-12) const {
        if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
        // compare as functions on a merged knot set (breakpoint lists may differ
        // by collinear points)
        std::vector<double> knots;
        for (const auto& p : pts_) knots.push_back(p.s_prime);
        for (const auto& p : other.pts_) knots.push_back(p.s_prime);
        for (double k : knots) {
            if (std::abs((*this)(k) - other(k)) > tol) return false;
        }
        return true;
    }

    static constexpr double kTol = 1e-12;

private:
    double segment_slope(std::size_t i) const {
        return (pts_[i + 1].sigma - pts_[i].sigma) / (pts_[i + 1].s_prime - pts_[i].s_prime);
    }

    static std::vector<FrontierPoint> dedupe(std::vector<FrontierPoint> pts) {
        std::vector<FrontierPoint> out;
        out.push_back(pts.front());
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const auto& a = out.back();
            const auto& b = pts[i];
            const auto& c = pts[i + 1];
            const double interp =
                a.sigma + (b.s_prime - a.s_prime) / (c.s_prime - a.s_prime) * (c.sigma - a.sigma);
            if (std::abs(interp - b.sigma) > kTol) out.push_back(b);
        }
        out.push_back(pts.back());
        return out;
    }

    std::vector<FrontierPoint> pts_;
    bool infinite_ = false;
};

// --- closed-form constructors ------------------------------------------------

// |t-t0|^gamma: slope-1 line through (-gamma, 0).
inline Frontier power_frontier(double gamma) {
    if (!(gamma > 0.0)) throw ParameterError("power_frontier requires gamma > 0");
    return Frontier::line(gamma, 1.0);
}

// chirp |t-t0|^gamma sin(|t-t0|^-beta): line s'/(beta+1) + gamma/(beta+1).
inline Frontier chirp_frontier(double gamma, double beta) {
    if (!(gamma > 0.0 && beta > 0.0))
        throw ParameterError("chirp_frontier requires gamma > 0 and beta > 0");
    return Frontier::line(gamma / (beta + 1.0), 1.0 / (beta + 1.0));
}

// Weierstrass W_h: sigma(s') = s' + h on the s' <= 0 half we work in.
inline Frontier weierstrass_frontier(double h) {
    if (!(h > 0.0 && h < 1.0)) throw ParameterError("weierstrass_frontier requires h in (0,1)");
    return Frontier::line(h, 1.0);
}

inline Frontier fbm_frontier(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ParameterError("fbm_frontier requires H in (0,1)");
    return Frontier::line(hurst, 1.0);
}

// Pointwise minimum; concave since both inputs are. The infinite frontier is
// the identity element.
inline Frontier min_frontier(const Frontier& a, const Frontier& b) {
    if (a.is_infinite()) return b;
    if (b.is_infinite()) return a;
    std::vector<double> knots{-1.0, 0.0};
    for (const auto& p : a.breakpoints()) knots.push_back(p.s_prime);
    for (const auto& p : b.breakpoints()) knots.push_back(p.s_prime);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double x, double y) { return std::abs(x - y) <= Frontier::kTol; }),
                knots.end());
    // both curves are linear between adjacent knots; insert crossings
    std::vector<double> full;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        full.push_back(knots[i]);
        if (i + 1 == knots.size()) break;
        const double x0 = knots[i], x1 = knots[i + 1];
        const double d0 = a(x0) - b(x0), d1 = a(x1) - b(x1);
        if ((d0 > Frontier::kTol && d1 < -Frontier::kTol) ||
            (d0 < -Frontier::kTol && d1 > Frontier::kTol)) {
            const double t = d0 / (d0 - d1);
            full.push_back(x0 + t * (x1 - x0));
        }
    }
    std::vector<FrontierPoint> pts;
    pts.reserve(full.size());
    for (double x : full) pts.push_back({x, std::min(a(x), b(x))});
    return Frontier::from_breakpoints(std::move(pts));
}

// mBm composition rule: min of the line H(t0)+s' and the H-function frontier.
inline Frontier mbm_frontier(double hurst_at_t0, const Frontier& h_frontier) {
    if (!(hurst_at_t0 > 0.0 && hurst_at_t0 < 1.0))
        throw ParameterError("mbm_frontier requires H(t0) in (0,1)");
    return min_frontier(Frontier::line(hurst_at_t0, 1.0), h_frontier);
}

// Wiener integral X_t = int_0^t eta dB + psi(t): the frontier is
// (1/2) phi(2s') ^ psi(s') where phi is the pseudo-frontier of t -> int_0^t eta^2.
inline Frontier wiener_frontier(const Frontier& phi_pseudo, const Frontier& psi_pseudo) {
    if (phi_pseudo.is_infinite()) return psi_pseudo;
    std::vector<double> knots{-1.0, 0.0};
    for (const auto& p : phi_pseudo.breakpoints()) {
        const double sp = p.s_prime / 2.0;
        if (sp > -1.0 + Frontier::kTol && sp < -Frontier::kTol) knots.push_back(sp);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double x, double y) { return std::abs(x - y) <= Frontier::kTol; }),
                knots.end());
    std::vector<FrontierPoint> pts;
    pts.reserve(knots.size());
    for (double sp : knots) pts.push_back({sp, 0.5 * phi_pseudo(2.0 * sp)});
    Frontier half = Frontier::from_breakpoints(std::move(pts));
    return min_frontier(half, psi_pseudo);
}

struct StableBoundResult {
    Frontier frontier;
    bool slope_clamped = false;
};

// Lower bound for stable integrals: s' -> (1/alpha) phi(alpha s') - 1/alpha,
// phi the pseudo-frontier of t -> int_0^t |eta|^alpha. Slopes are inherited
// from phi, so they only need clamping if the input was out of contract.
inline StableBoundResult stable_lower_bound_frontier(const Frontier& phi_pseudo, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParameterError("stable_lower_bound_frontier requires alpha in (0,2)");
    if (phi_pseudo.is_infinite()) return {Frontier::infinite(), false};
    std::vector<double> knots{-1.0, 0.0};
    for (const auto& p : phi_pseudo.breakpoints()) {
        const double sp = p.s_prime / alpha;
        if (sp > -1.0 + Frontier::kTol && sp < -Frontier::kTol) knots.push_back(sp);
    }
    std::sort(knots.begin(), knots.end());
    bool clamped = false;
    std::vector<FrontierPoint> pts;
    for (double sp : knots) {
        pts.push_back({sp, (phi_pseudo(alpha * sp) - 1.0) / alpha});
    }
    // repair slope violations by walking from the right
    for (std::size_t i = pts.size() - 1; i > 0; --i) {
        const double dx = pts[i].s_prime - pts[i - 1].s_prime;
        const double sl = (pts[i].sigma - pts[i - 1].sigma) / dx;
        if (sl > 1.0 + Frontier::kTol) {
            pts[i - 1].sigma = pts[i].sigma - dx;
            clamped = true;
        } else if (sl < -Frontier::kTol) {
            pts[i - 1].sigma = pts[i].sigma;
            clamped = true;
        }
    }
    return {Frontier::from_breakpoints(std::move(pts)), clamped};
}

// alpha(t0) = -inf{s' : sigma(s') >= 0}, +inf when sigma stays nonnegative
// along the left slope extension. A frontier already negative at s' = 0 has
// no nonnegative point in our half-plane; 0 is reported and the region-D
// flag in reports marks the result as outside the validity window.
inline double pointwise_exponent(const Frontier& f) {
    if (f.is_infinite()) return std::numeric_limits<double>::infinity();
    if (f(0.0) < 0.0) return 0.0;
    std::vector<double> knots{-1.0, 0.0};
    for (const auto& p : f.breakpoints()) knots.push_back(p.s_prime);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double x, double y) { return std::abs(x - y) <= Frontier::kTol; }),
                knots.end());
    // f is linear between adjacent knots; find the zero crossing from the right
    for (std::size_t i = knots.size() - 1; i > 0; --i) {
        const double lo = knots[i - 1], hi = knots[i];
        const double flo = f(lo), fhi = f(hi);
        if (flo < 0.0 && fhi >= 0.0) {
            const double sl = (fhi - flo) / (hi - lo);
            return -(hi - fhi / sl);
        }
    }
    // nonnegative down to s' = -1: continue along the left slope extension
    const double fm1 = f(-1.0);
    const double sl = f.slope_left();
    if (sl <= Frontier::kTol) {
        if (fm1 <= Frontier::kTol) return 1.0;
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 + fm1 / sl;
}

inline double local_exponent(const Frontier& f) {
    if (f.is_infinite()) return std::numeric_limits<double>::infinity();
    return f(0.0);
}

// Fractional integro-differentiation of order eps translates the frontier by
// -eps along the sigma axis (eps > 0: differentiation).
inline Frontier translate_frontier(const Frontier& f, double eps) {
    if (f.is_infinite()) return f;
    std::vector<FrontierPoint> pts = f.breakpoints();
    for (auto& p : pts) p.sigma -= eps;
    return Frontier::from_breakpoints(std::move(pts));
}

struct RegionD {
    static bool contains(double s_prime, double sigma) {
        return s_prime > -1.0 && s_prime < 0.0 && sigma > 0.0 && sigma < 1.0 + s_prime;
    }
};

struct ClipResult {
    Frontier frontier;        // restriction of the input to region D (input if empty)
    bool intersects = false;  // false: results lie outside the validity window
};

// Restrict to D = {-1 < s' < 0, 0 < sigma < 1+s'}. Since sigma is
// non-decreasing, {sigma > 0} is a right interval; since slopes are <= 1,
// sigma - (1+s') is non-increasing and {sigma < 1+s'} is also a right
// interval. The intersection is one interval (lo, 0).
inline ClipResult clip_to_region_d(const Frontier& f) {
    if (f.is_infinite()) return {f, false};
    if (f(0.0) <= 0.0) return {f, false};      // never strictly above zero on (-1,0)
    if (f(0.0) >= 1.0) return {f, false};      // above the ceiling at the right end
    auto bad = [&](double sp) { return f(sp) <= 0.0 || f(sp) >= 1.0 + sp; };
    double lo = -1.0;
    if (bad(-1.0)) {
        double a = -1.0, b = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            (bad(m) ? a : b) = m;
        }
        lo = b;
    }
    if (lo >= -Frontier::kTol) return {f, false};
    std::vector<FrontierPoint> pts;
    pts.push_back({lo, f(lo)});
    for (const auto& p : f.breakpoints()) {
        if (p.s_prime > lo + Frontier::kTol && p.s_prime < -Frontier::kTol) pts.push_back(p);
    }
    pts.push_back({0.0, f(0.0)});
    return {Frontier::from_breakpoints(std::move(pts)), true};
}

struct RegularityReport {
    double pointwise = 0.0;
    double local = 0.0;
    Frontier frontier = Frontier::infinite();
    bool in_region_d = false;
};

inline RegularityReport report(const Frontier& f) {
    RegularityReport r;
    r.pointwise = pointwise_exponent(f);
    r.local = local_exponent(f);
    r.frontier = f;
    r.in_region_d = clip_to_region_d(f).intersects;
    return r;
}

// --- pseudo-frontiers of model functions -------------------------------------
//
// The pseudo-frontier applies the oscillation-over-balls definition at every
// (s', sigma), not only inside region D. For a chirp the usual line holds on
// s' >= -gamma, but deeper the ball-diameter pairs bind and the curve follows
// s' + gamma: the honest object is min(line, s'+gamma). Smooth functions cap
// at 1 + s'.

inline Frontier pseudo_frontier(const ScalarFunctionSpec& spec, double t0) {
    struct V {
        double t0;
        Frontier operator()(const ConstantFn&) const { return Frontier::infinite(); }
        Frontier operator()(const PowerFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            if (f.gamma <= 1.0) return power_frontier(f.gamma);
            return min_frontier(Frontier::line(f.gamma, 1.0), Frontier::line(1.0, 0.0));
        }
        Frontier operator()(const ChirpFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return min_frontier(chirp_frontier(f.gamma, f.beta), Frontier::line(f.gamma, 1.0));
        }
        Frontier operator()(const AffineChirpFn& f) const {
            if (f.b == 0.0) return Frontier::infinite();
            return (*this)(ChirpFn{f.gamma, f.beta, f.t0});
        }
        Frontier operator()(const SqrtAbsChirpFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            const double g = f.gamma / f.root_order;
            return min_frontier(chirp_frontier(g, f.beta), Frontier::line(g, 1.0));
        }
        Frontier operator()(const TableFn&) const {
            throw UnsupportedError("no closed-form pseudo-frontier for table functions");
        }
    };
    return std::visit(V{t0}, spec);
}

namespace detail {

// phi(t) = int_0^t g with g >= 0 of envelope exponent env_exp at t0. The
// integral of a nonnegative envelope does not oscillate, so its increments
// behave like the power |t-t0|^(env_exp+1) capped by the slope-1 pairs:
// min(env_exp + 1 + s', 1).
inline Frontier nonneg_primitive_pseudo_frontier(double env_exp) {
    return min_frontier(Frontier::line(env_exp + 1.0, 1.0), Frontier::line(1.0, 0.0));
}

} // namespace detail

// Pseudo-frontier of phi(t) = int_0^t eta^2 at t0, the phi input of
// wiener_frontier.
inline Frontier wiener_phi_pseudo_frontier(const ScalarFunctionSpec& eta, double t0) {
    struct V {
        double t0;
        Frontier operator()(const ConstantFn& f) const {
            return f.c == 0.0 ? Frontier::infinite() : Frontier::line(1.0, 1.0);
        }
        Frontier operator()(const PowerFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return detail::nonneg_primitive_pseudo_frontier(2.0 * f.gamma);
        }
        Frontier operator()(const ChirpFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return detail::nonneg_primitive_pseudo_frontier(2.0 * f.gamma);
        }
        Frontier operator()(const AffineChirpFn&) const {
            throw UnsupportedError("affine chirp kernels are not supported here");
        }
        Frontier operator()(const SqrtAbsChirpFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return detail::nonneg_primitive_pseudo_frontier(2.0 * f.gamma / f.root_order);
        }
        Frontier operator()(const TableFn&) const {
            throw UnsupportedError("no closed-form pseudo-frontier for table kernels");
        }
    };
    return std::visit(V{t0}, eta);
}

// Pseudo-frontier of phi(t) = int_0^t |eta|^alpha at t0 (stable integrals).
inline Frontier stable_phi_pseudo_frontier(const ScalarFunctionSpec& eta, double alpha,
                                           double t0) {
    struct V {
        double t0, alpha;
        Frontier operator()(const ConstantFn& f) const {
            return f.c == 0.0 ? Frontier::infinite() : Frontier::line(1.0, 1.0);
        }
        Frontier operator()(const PowerFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return detail::nonneg_primitive_pseudo_frontier(alpha * f.gamma);
        }
        Frontier operator()(const ChirpFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return detail::nonneg_primitive_pseudo_frontier(alpha * f.gamma);
        }
        Frontier operator()(const AffineChirpFn&) const {
            throw UnsupportedError("affine chirp kernels are not supported here");
        }
        Frontier operator()(const SqrtAbsChirpFn& f) const {
            if (std::abs(t0 - f.t0) > 1e-12) return Frontier::line(1.0, 1.0);
            return detail::nonneg_primitive_pseudo_frontier(alpha * f.gamma / f.root_order);
        }
        Frontier operator()(const TableFn&) const {
            throw UnsupportedError("no closed-form pseudo-frontier for table kernels");
        }
    };
    return std::visit(V{t0, alpha}, eta);
}

} // namespace microloc
