#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "microloc/acceptance.hpp"

using microloc::acceptance::CriterionResult;

namespace {
void report(const CriterionResult& r) {
    std::printf("[%s] %-4s %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
}
} // namespace

TEST_CASE("A1 fbm frontier line") {
    const auto r = microloc::acceptance::a1_fbm_frontier_line();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A2 mbm chirp regimes") {
    const auto r = microloc::acceptance::a2_mbm_chirp_regimes();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A3 gw frontier line") {
    const auto r = microloc::acceptance::a3_gw_frontier_line();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A4 wiener chirp integral") {
    const auto r = microloc::acceptance::a4_wiener_chirp();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A5 frontier translation") {
    const auto r = microloc::acceptance::a5_frontier_translation();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A6 stable lower bound") {
    const auto r = microloc::acceptance::a6_stable_lower_bound();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A7 oracle equivalence") {
    const auto r = microloc::acceptance::a7_oracle_equivalence();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A8 frontier algebra") {
    const auto r = microloc::acceptance::a8_frontier_algebra();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A9 deterministic bridge") {
    const auto r = microloc::acceptance::a9_deterministic_bridge();
    report(r);
    REQUIRE(r.pass);
}

TEST_CASE("A10 gaussian moments") {
    const auto r = microloc::acceptance::a10_gaussian_moments();
    report(r);
    REQUIRE(r.pass);
}
