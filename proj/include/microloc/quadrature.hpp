#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace microloc {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0;
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double fa,
                               double b, double fb, double m, double fm, double whole, double eps,
                               int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) < 15.0 * eps) {
        return left + right + diff / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature to absolute tolerance eps.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-9) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_simpson(f, a, fa, b, fb, m, fm, whole, eps, 48);
}

// Tail integrals T(x) = int_x^inf v^(-p-1) |sin v|^q dv, p > 0, q > 0.
//
// Chirp-type kernels |u|^g |sin u^(-beta)|^q reduce to this family under
// u = v^(-1/beta); the substitution turns the infinite oscillation at u -> 0
// into a plain decaying tail that can be summed half-period by half-period.
class AbsSinPowerTail {
public:
    AbsSinPowerTail(double p, double q) : p_(p), q_(q) {
        const double pi = std::numbers::pi;
        mean_q_ = composite(0.0, pi, 512,
                            [&](double v) { return std::pow(std::abs(std::sin(v)), q_); }) /
                  pi;
        cum_.resize(static_cast<std::size_t>(k_cut_) + 1, 0.0);
        cum_[static_cast<std::size_t>(k_cut_)] = asymptotic(k_cut_ * pi);
        for (int k = k_cut_ - 1; k >= 0; --k) {
            const double a = k * pi, b = (k + 1) * pi;
            const double seg = composite(a, b, 48, [&](double v) {
                return (v == 0.0) ? 0.0 : std::pow(v, -p_ - 1.0) * std::pow(std::abs(std::sin(v)), q_);
            });
            cum_[static_cast<std::size_t>(k)] = cum_[static_cast<std::size_t>(k) + 1] + seg;
        }
    }

    double operator()(double x) const {
        const double pi = std::numbers::pi;
        if (x >= k_cut_ * pi) return asymptotic(x);
        const int k = static_cast<int>(std::floor(x / pi));
        const double upper = (k + 1) * pi;
        const double partial = composite(x, upper, 48, [&](double v) {
            return (v == 0.0) ? 0.0 : std::pow(v, -p_ - 1.0) * std::pow(std::abs(std::sin(v)), q_);
        });
        return partial + cum_[static_cast<std::size_t>(k) + 1];
    }

    double mean_abs_sin_pow() const { return mean_q_; }

private:
    // |sin|^q averages to mean_q over each half period, so far in the tail
    // the integrand behaves like mean_q * v^(-p-1).
    double asymptotic(double x) const { return mean_q_ * std::pow(x, -p_) / p_; }

    template <typename F>
    static double composite(double a, double b, int segments, F&& f) {
        // composite Simpson with 2*segments panels
        const int n = 2 * segments;
        const double h = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) {
            s += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
        }
        return s * h / 3.0;
    }

    double p_, q_;
    double mean_q_ = 0.0;
    int k_cut_ = 2048;
    std::vector<double> cum_;
};

} // namespace microloc
