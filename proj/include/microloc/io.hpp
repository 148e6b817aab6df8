#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "microloc/errors.hpp"
#include "microloc/frontier.hpp"
#include "microloc/process_spec.hpp"
#include "microloc/sampled_path.hpp"

namespace microloc {

using json = nlohmann::json;

// --- spec <-> json ------------------------------------------------------------

inline json to_json(const ScalarFunctionSpec& spec) {
    struct V {
        json operator()(const ConstantFn& f) const { return {{"type", "constant"}, {"c", f.c}}; }
        json operator()(const PowerFn& f) const {
            return {{"type", "power"}, {"gamma", f.gamma}, {"t0", f.t0}};
        }
        json operator()(const ChirpFn& f) const {
            return {{"type", "chirp"}, {"gamma", f.gamma}, {"beta", f.beta}, {"t0", f.t0}};
        }
        json operator()(const AffineChirpFn& f) const {
            return {{"type", "affine_chirp"}, {"a", f.a},      {"b", f.b},
                    {"gamma", f.gamma},       {"beta", f.beta}, {"t0", f.t0}};
        }
        json operator()(const SqrtAbsChirpFn& f) const {
            return {{"type", "sqrt_abs_chirp"},
                    {"gamma", f.gamma},
                    {"beta", f.beta},
                    {"t0", f.t0},
                    {"root_order", f.root_order}};
        }
        json operator()(const TableFn& f) const {
            return {{"type", "table"}, {"t_start", f.t_start}, {"dt", f.dt}, {"values", f.values}};
        }
    };
    return std::visit(V{}, spec);
}

inline ScalarFunctionSpec scalar_spec_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") return ConstantFn{j.at("c").get<double>()};
    if (type == "power") return PowerFn{j.at("gamma").get<double>(), j.value("t0", 0.0)};
    if (type == "chirp")
        return ChirpFn{j.at("gamma").get<double>(), j.at("beta").get<double>(), j.value("t0", 0.0)};
    if (type == "affine_chirp")
        return AffineChirpFn{j.at("a").get<double>(), j.at("b").get<double>(),
                             j.at("gamma").get<double>(), j.at("beta").get<double>(),
                             j.value("t0", 0.0)};
    if (type == "sqrt_abs_chirp")
        return SqrtAbsChirpFn{j.at("gamma").get<double>(), j.at("beta").get<double>(),
                              j.value("t0", 0.0), j.value("root_order", 2.0)};
    if (type == "table")
        return TableFn{j.at("t_start").get<double>(), j.at("dt").get<double>(),
                       j.at("values").get<std::vector<double>>()};
    throw IoError("unknown scalar function type: " + type);
}

inline json to_json(const ProcessSpec& spec) {
    struct V {
        json operator()(const FBmSpec& s) const { return {{"type", "fbm"}, {"h", s.hurst}}; }
        json operator()(const MBmSpec& s) const {
            return {{"type", "mbm"}, {"h", to_json(s.h)}};
        }
        json operator()(const GWSpec& s) const {
            return {{"type", "gw"}, {"h", to_json(s.h)}, {"lambda", s.lambda}, {"depth", s.depth}};
        }
        json operator()(const WienerIntegralSpec& s) const {
            return {{"type", "wiener"}, {"eta", to_json(s.eta)}, {"psi", to_json(s.psi)}};
        }
        json operator()(const StableIntegralSpec& s) const {
            return {{"type", "stable"}, {"eta", to_json(s.eta)}, {"alpha", s.alpha}};
        }
    };
    return std::visit(V{}, spec);
}

inline ProcessSpec process_spec_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "fbm") return FBmSpec{j.at("h").get<double>()};
    if (type == "mbm") return MBmSpec{scalar_spec_from_json(j.at("h"))};
    if (type == "gw")
        return GWSpec{scalar_spec_from_json(j.at("h")), j.at("lambda").get<double>(),
                      j.at("depth").get<int>()};
    if (type == "wiener")
        return WienerIntegralSpec{scalar_spec_from_json(j.at("eta")),
                                  scalar_spec_from_json(j.at("psi"))};
    if (type == "stable")
        return StableIntegralSpec{scalar_spec_from_json(j.at("eta")), j.at("alpha").get<double>()};
    throw IoError("unknown process type: " + type);
}

inline json to_json(const PathMeta& meta) {
    json j;
    if (meta.spec) j["spec"] = to_json(*meta.spec);
    if (meta.seed) j["seed"] = *meta.seed;
    if (meta.cholesky_fallback) j["cholesky_fallback"] = true;
    if (meta.burn_in) j["burn_in"] = *meta.burn_in;
    if (meta.frac_order) j["frac_order"] = *meta.frac_order;
    return j;
}

inline PathMeta path_meta_from_json(const json& j) {
    PathMeta m;
    if (j.contains("spec")) m.spec = process_spec_from_json(j.at("spec"));
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    m.cholesky_fallback = j.value("cholesky_fallback", false);
    if (j.contains("burn_in")) m.burn_in = j.at("burn_in").get<std::size_t>();
    if (j.contains("frac_order")) m.frac_order = j.at("frac_order").get<double>();
    return m;
}

// --- sampled path files ---------------------------------------------------------
//
// Binary layout: "MLP1", u64 n, f64 t_start, f64 dt, n x f64 samples, all
// little-endian. The meta sidecar is written next to the file as
// "<file>.meta.json".

inline void write_path_binary(const SampledPath& path, const std::string& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + file);
    os.write("MLP1", 4);
    const std::uint64_t n = path.values.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&path.t_start), sizeof path.t_start);
    os.write(reinterpret_cast<const char*>(&path.dt), sizeof path.dt);
    os.write(reinterpret_cast<const char*>(path.values.data()),
             static_cast<std::streamsize>(n * sizeof(double)));
    if (!os) throw IoError("short write: " + file);
    if (path.meta) {
        std::ofstream ms(file + ".meta.json");
        ms << to_json(*path.meta).dump(2) << "\n";
    }
}

inline SampledPath read_path_binary(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw IoError("cannot open: " + file);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "MLP1", 4) != 0) throw IoError("bad magic in " + file);
    std::uint64_t n = 0;
    SampledPath p;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&p.t_start), sizeof p.t_start);
    is.read(reinterpret_cast<char*>(&p.dt), sizeof p.dt);
    p.values.resize(n);
    is.read(reinterpret_cast<char*>(p.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw IoError("truncated path file: " + file);
    std::ifstream ms(file + ".meta.json");
    if (ms) {
        json j;
        ms >> j;
        p.meta = path_meta_from_json(j);
    }
    validate(p);
    return p;
}

namespace detail {
inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

inline void write_path_csv(const SampledPath& path, const std::string& file) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot open for writing: " + file);
    os << "t,value\n";
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        os << detail::fmt_g17(path.time(k)) << "," << detail::fmt_g17(path.values[k]) << "\n";
    }
}

inline SampledPath read_path_csv(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open: " + file);
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,value", 0) != 0)
        throw IoError("expected 't,value' header in " + file);
    std::vector<double> ts, vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("bad csv row in " + file);
        ts.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (ts.size() < 2) throw IoError("csv path needs at least 2 rows: " + file);
    SampledPath p;
    p.t_start = ts.front();
    p.dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    p.values = std::move(vs);
    validate(p);
    return p;
}

// --- frontier files -------------------------------------------------------------

inline std::string frontier_to_csv(const Frontier& f) {
    std::ostringstream os;
    os << "s_prime,sigma\n";
    if (f.is_infinite()) {
        os << "-1,inf\n0,inf\n";
        return os.str();
    }
    for (const auto& p : f.breakpoints()) {
        os << detail::fmt_g17(p.s_prime) << "," << detail::fmt_g17(p.sigma) << "\n";
    }
    return os.str();
}

inline Frontier frontier_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("s_prime,sigma", 0) != 0)
        throw IoError("expected 's_prime,sigma' header");
    std::vector<FrontierPoint> pts;
    bool infinite = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string sig = line.substr(comma + 1);
        if (sig == "inf") {
            infinite = true;
            continue;
        }
        pts.push_back({std::stod(line.substr(0, comma)), std::stod(sig)});
    }
    if (infinite) return Frontier::infinite();
    return Frontier::from_breakpoints(std::move(pts));
}

inline json to_json(const RegularityReport& r) {
    json j;
    auto num = [](double v) -> json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    j["pointwise"] = num(r.pointwise);
    j["local"] = num(r.local);
    j["in_region_D"] = r.in_region_d;
    json bps = json::array();
    if (!r.frontier.is_infinite()) {
        for (const auto& p : r.frontier.breakpoints()) {
            bps.push_back(json::array({p.s_prime, p.sigma}));
        }
    }
    j["breakpoints"] = bps;
    return j;
}

} // namespace microloc
