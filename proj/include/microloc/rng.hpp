#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "microloc/errors.hpp"

namespace microloc {

// Counter-based generator (Philox 4x32-10). A draw is a pure function of
// (seed, stream, counter), so ensemble path i can use stream=i and be
// generated in any order, on any thread, with bit-identical results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint64_t next_u64() {
        if (block_pos_ == 0) {
            block_ = philox_block(block_index_++);
        }
        const std::uint64_t lo = block_[2 * block_pos_];
        const std::uint64_t hi = block_[2 * block_pos_ + 1];
        block_pos_ = (block_pos_ + 1) % 2;
        return lo | (hi << 32);
    }

    // Uniform in [0,1) with 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; rejection-free so the draw count per
    // sample is fixed and streams stay aligned.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_double(); // (0,1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Symmetric alpha-stable (scale 1) by the Chambers-Mallows-Stuck map.
    double next_stable(double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0)) {
            throw ParameterError("stable index alpha must lie in (0,2)");
        }
        if (alpha == 1.0) {
            throw ParameterError("alpha = 1 stable draws are not supported");
        }
        const double u = std::numbers::pi * (next_double() - 0.5); // (-pi/2, pi/2)
        const double w = -std::log(1.0 - next_double());           // Exp(1)
        const double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
        const double t = std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
        return s * t;
    }

private:
    using Block = std::array<std::uint32_t, 4>;

    static std::pair<std::uint32_t, std::uint32_t> mulhilo(std::uint32_t a, std::uint32_t b) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        return {static_cast<std::uint32_t>(p >> 32), static_cast<std::uint32_t>(p)};
    }

    Block philox_block(std::uint64_t index) const {
        std::uint32_t x0 = static_cast<std::uint32_t>(index);
        std::uint32_t x1 = static_cast<std::uint32_t>(index >> 32);
        std::uint32_t x2 = stream_lo_;
        std::uint32_t x3 = stream_hi_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const auto [hi0, lo0] = mulhilo(0xD2511F53u, x0);
            const auto [hi1, lo1] = mulhilo(0xCD9E8D57u, x2);
            const std::uint32_t y0 = hi1 ^ x1 ^ k0;
            const std::uint32_t y1 = lo1;
            const std::uint32_t y2 = hi0 ^ x3 ^ k1;
            const std::uint32_t y3 = lo0;
            x0 = y0;
            x1 = y1;
            x2 = y2;
            x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {x0, x1, x2, x3};
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_index_ = 0;
    Block block_{};
    int block_pos_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace microloc
