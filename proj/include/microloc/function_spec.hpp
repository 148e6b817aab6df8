#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "microloc/errors.hpp"

namespace microloc {

// Symbolic deterministic scalar functions: H functions for mBm/GW, kernels
// eta and drifts psi for Wiener/stable integrals. Carrying the structure
// (rather than a plain callable) is what lets the frontier layer produce
// closed forms and the covariance lab produce exact integrals.

struct ConstantFn {
    double c = 0.0;
};

// |t - t0|^gamma
struct PowerFn {
    double gamma = 0.5;
    double t0 = 0.0;
};

// |t - t0|^gamma * sin(|t - t0|^-beta)
struct ChirpFn {
    double gamma = 0.5;
    double beta = 1.0;
    double t0 = 0.0;
};

// a + b * |t - t0|^gamma * sin(|t - t0|^-beta)
struct AffineChirpFn {
    double a = 0.5;
    double b = 0.1;
    double gamma = 0.5;
    double beta = 1.0;
    double t0 = 0.0;
};

// (|t - t0|^gamma * |sin(|t - t0|^-beta)|)^(1/root_order)
struct SqrtAbsChirpFn {
    double gamma = 0.5;
    double beta = 1.0;
    double t0 = 0.0;
    double root_order = 2.0;
};

// Uniformly sampled table, linear interpolation, clamped at the ends.
struct TableFn {
    double t_start = 0.0;
    double dt = 1.0;
    std::vector<double> values;
};

using ScalarFunctionSpec =
    std::variant<ConstantFn, PowerFn, ChirpFn, AffineChirpFn, SqrtAbsChirpFn, TableFn>;

inline void validate(const ScalarFunctionSpec& spec) {
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PowerFn>) {
                if (!(f.gamma > 0.0)) throw ParameterError("power function requires gamma > 0");
            } else if constexpr (std::is_same_v<T, ChirpFn>) {
                if (!(f.gamma > 0.0 && f.beta > 0.0))
                    throw ParameterError("chirp requires gamma > 0 and beta > 0");
            } else if constexpr (std::is_same_v<T, AffineChirpFn>) {
                if (!(f.gamma > 0.0 && f.beta > 0.0))
                    throw ParameterError("affine chirp requires gamma > 0 and beta > 0");
            } else if constexpr (std::is_same_v<T, SqrtAbsChirpFn>) {
                if (!(f.gamma > 0.0 && f.beta > 0.0 && f.root_order > 0.0))
                    throw ParameterError("sqrt-abs chirp requires gamma, beta, root_order > 0");
            } else if constexpr (std::is_same_v<T, TableFn>) {
                if (f.values.size() < 2 || !(f.dt > 0.0))
                    throw ParameterError("table requires >= 2 values and dt > 0");
            }
        },
        spec);
}

namespace detail {

// sin(|d|^-beta) with the removable value 0 at d = 0 (the envelope limit).
inline double chirp_phase(double d, double beta) {
    const double ad = std::abs(d);
    if (ad == 0.0) return 0.0;
    return std::sin(std::pow(ad, -beta));
}

} // namespace detail

inline double evaluate(const ScalarFunctionSpec& spec, double t) {
    return std::visit(
        [t](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ConstantFn>) {
                return f.c;
            } else if constexpr (std::is_same_v<T, PowerFn>) {
                return std::pow(std::abs(t - f.t0), f.gamma);
            } else if constexpr (std::is_same_v<T, ChirpFn>) {
                const double d = t - f.t0;
                return std::pow(std::abs(d), f.gamma) * detail::chirp_phase(d, f.beta);
            } else if constexpr (std::is_same_v<T, AffineChirpFn>) {
                const double d = t - f.t0;
                return f.a + f.b * std::pow(std::abs(d), f.gamma) * detail::chirp_phase(d, f.beta);
            } else if constexpr (std::is_same_v<T, SqrtAbsChirpFn>) {
                const double d = t - f.t0;
                const double base =
                    std::pow(std::abs(d), f.gamma) * std::abs(detail::chirp_phase(d, f.beta));
                return std::pow(base, 1.0 / f.root_order);
            } else {
                if (f.values.empty()) return 0.0;
                const double x = (t - f.t_start) / f.dt;
                if (x <= 0.0) return f.values.front();
                const auto last = static_cast<double>(f.values.size() - 1);
                if (x >= last) return f.values.back();
                const auto i = static_cast<std::size_t>(x);
                const double w = x - static_cast<double>(i);
                return (1.0 - w) * f.values[i] + w * f.values[i + 1];
            }
        },
        spec);
}

inline bool is_identically_zero(const ScalarFunctionSpec& spec) {
    if (const auto* c = std::get_if<ConstantFn>(&spec)) return c->c == 0.0;
    return false;
}

inline std::string spec_name(const ScalarFunctionSpec& spec) {
    struct V {
        std::string operator()(const ConstantFn&) const { return "constant"; }
        std::string operator()(const PowerFn&) const { return "power"; }
        std::string operator()(const ChirpFn&) const { return "chirp"; }
        std::string operator()(const AffineChirpFn&) const { return "affine_chirp"; }
        std::string operator()(const SqrtAbsChirpFn&) const { return "sqrt_abs_chirp"; }
        std::string operator()(const TableFn&) const { return "table"; }
    };
    return std::visit(V{}, spec);
}

} // namespace microloc
