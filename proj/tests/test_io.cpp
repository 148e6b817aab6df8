#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "microloc/io.hpp"
#include "microloc/rng.hpp"
#include "microloc/synth.hpp"

using namespace microloc;

namespace {
struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() / "microloc_io_test";
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string file(const char* name) const { return (dir / name).string(); }
};
} // namespace

TEST_CASE("binary path round trip is bit identical") {
    TempDir tmp;
    const auto p = synth_fbm(0.55, 300, 6.1e-5, 7);
    write_path_binary(p, tmp.file("p.mlp"));
    const auto q = read_path_binary(tmp.file("p.mlp"));
    REQUIRE(q.t_start == p.t_start);
    REQUIRE(q.dt == p.dt);
    REQUIRE(q.values.size() == p.values.size());
    for (std::size_t i = 0; i < p.values.size(); ++i) REQUIRE(q.values[i] == p.values[i]);
    REQUIRE(q.meta.has_value());
    REQUIRE(q.meta->seed == 7);
    const auto* spec = std::get_if<FBmSpec>(&*q.meta->spec);
    REQUIRE(spec != nullptr);
    REQUIRE(spec->hurst == 0.55);
}

TEST_CASE("csv path round trip preserves values") {
    TempDir tmp;
    const auto p = synth_gw(ConstantFn{0.5}, 2.0, 64, 128, 1.0 / 128.0, 9);
    write_path_csv(p, tmp.file("p.csv"));
    const auto q = read_path_csv(tmp.file("p.csv"));
    REQUIRE(q.values.size() == p.values.size());
    for (std::size_t i = 0; i < p.values.size(); ++i) REQUIRE(q.values[i] == p.values[i]);
    REQUIRE(q.dt == Catch::Approx(p.dt).epsilon(1e-15));
}

TEST_CASE("bad files are rejected") {
    TempDir tmp;
    {
        std::ofstream os(tmp.file("bad.mlp"), std::ios::binary);
        os << "NOPE";
    }
    REQUIRE_THROWS_AS(read_path_binary(tmp.file("bad.mlp")), IoError);
    REQUIRE_THROWS_AS(read_path_binary(tmp.file("missing.mlp")), IoError);
}

TEST_CASE("frontier csv round trip is exact") {
    CounterRng rng(31, 0);
    for (int i = 0; i < 50; ++i) {
        const Frontier f = min_frontier(
            chirp_frontier(0.05 + rng.next_double(), 0.05 + 2.0 * rng.next_double()),
            power_frontier(0.05 + rng.next_double()));
        const Frontier g = frontier_from_csv(frontier_to_csv(f));
        const auto& a = f.breakpoints();
        const auto& b = g.breakpoints();
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            REQUIRE(a[k].s_prime == b[k].s_prime); // %.17g round-trips doubles exactly
            REQUIRE(a[k].sigma == b[k].sigma);
        }
    }
    const Frontier inf = frontier_from_csv(frontier_to_csv(Frontier::infinite()));
    REQUIRE(inf.is_infinite());
}

TEST_CASE("process spec json round trip") {
    const std::vector<ProcessSpec> specs = {
        FBmSpec{0.7},
        MBmSpec{AffineChirpFn{0.5, 0.35, 0.7, 1.0, 0.5}},
        GWSpec{ConstantFn{0.5}, 2.0, 60},
        WienerIntegralSpec{SqrtAbsChirpFn{0.3, 0.5, 0.5, 2.0}, PowerFn{0.8, 0.5}},
        StableIntegralSpec{SqrtAbsChirpFn{0.6, 1.0, 0.5, 1.5}, 1.5},
    };
    for (const auto& s : specs) {
        const ProcessSpec back = process_spec_from_json(to_json(s));
        REQUIRE(to_json(back).dump() == to_json(s).dump());
    }
}

TEST_CASE("regularity report json shape") {
    const auto rep = report(mbm_frontier(0.5, chirp_frontier(0.7, 1.0)));
    const json j = to_json(rep);
    REQUIRE(j.at("pointwise").get<double>() == Catch::Approx(0.5));
    REQUIRE(j.at("local").get<double>() == Catch::Approx(0.35));
    REQUIRE(j.at("in_region_D").get<bool>());
    REQUIRE(j.at("breakpoints").size() >= 2);

    const json inf = to_json(report(Frontier::infinite()));
    REQUIRE(inf.at("pointwise").get<std::string>() == "inf");
}
