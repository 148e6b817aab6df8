#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "microloc/errors.hpp"
#include "microloc/process_spec.hpp"

namespace microloc {

// Uniformly sampled realization of a process; the object every estimator
// consumes. Sample k lives at time t_start + k*dt. Immutable by convention
// once built, so it can be shared across estimation threads.
struct SampledPath {
    double t_start = 0.0;
    double dt = 1.0;
    std::vector<double> values;
    std::optional<PathMeta> meta;

    std::size_t size() const { return values.size(); }
    double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
    double t_end() const { return time(values.size() - 1); }
    double range() const { return t_end() - t_start; }
};

inline void validate(const SampledPath& p) {
    if (!(p.dt > 0.0)) throw ParameterError("sampled path requires dt > 0");
    if (p.values.size() < 2) throw ParameterError("sampled path requires at least 2 values");
    for (double v : p.values) {
        if (!std::isfinite(v)) throw ParameterError("sampled path contains non-finite value");
    }
}

inline SampledPath make_path(double t_start, double dt, std::vector<double> values,
                             std::optional<PathMeta> meta = std::nullopt) {
    SampledPath p{t_start, dt, std::move(values), std::move(meta)};
    validate(p);
    return p;
}

} // namespace microloc
