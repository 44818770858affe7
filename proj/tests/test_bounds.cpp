#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "prusim/bounds.hpp"

using namespace prusim;

TEST_CASE("stated bounds") {
    CHECK(stated_bound("VL_FL", 16, 1) == doctest::Approx(std::sqrt(3.0 / 16)));
    CHECK(stated_bound("V_F", 16, 1) == doctest::Approx(8 * std::sqrt(15.0 / 16)));
    CHECK(stated_bound("FLdag_FL_id", 4, 2) == doctest::Approx(0.5));
    CHECK(stated_bound("FLdag_U_FR", 16, 2) == doctest::Approx(3 * std::sqrt(0.5)));
    CHECK(std::isnan(stated_bound("first_forward", 4, 1)));
}

TEST_CASE("kind names round-trip") {
    for (BoundKind k : {BoundKind::Upper, BoundKind::Equal, BoundKind::Trend})
        CHECK(kind_from_name(kind_name(k)) == k);
    CHECK_THROWS(kind_from_name("lower"));
}

TEST_CASE("shipped catalog file equals the built-in catalog") {
    const auto file = load_catalog(PRUSIM_SOURCE_DIR "/data/bound_catalog.json");
    const auto& builtin = builtin_catalog();
    REQUIRE(file.size() == builtin.size());
    for (std::size_t i = 0; i < file.size(); ++i) {
        CHECK(file[i].id == builtin[i].id);
        CHECK(file[i].N_grid == builtin[i].N_grid);
        CHECK(file[i].t_grid == builtin[i].t_grid);
        CHECK(file[i].kind == builtin[i].kind);
    }
    CHECK(catalog_suite(file, "appendix-a").size() == 4);
}

TEST_CASE("catalog files are validated") {
    const std::string path = "bounds_test_catalog.json";
    auto write = [&](const char* text) { std::ofstream(path) << text; };
    write(R"({"schema": "prusim.bound_catalog/1", "bounds": [{"id": "VL_FL", "N_grid": [8]}]})");
    const auto c = load_catalog(path);
    REQUIRE(c.size() == 1);
    CHECK(c[0].N_grid == std::vector<int>{8});
    CHECK(c[0].t_grid == builtin_catalog().front().t_grid);
    write(R"({"schema": "other", "bounds": []})");
    CHECK_THROWS_AS(load_catalog(path), std::invalid_argument);
    write(R"({"schema": "prusim.bound_catalog/1", "bounds": [{"id": "mystery"}]})");
    CHECK_THROWS_AS(load_catalog(path), std::invalid_argument);
    write(R"({"schema": "prusim.bound_catalog/1", "bounds": [{"id": "VL_FL", "N_grid": [6]}]})");
    CHECK_THROWS_AS(load_catalog(path), std::invalid_argument);
    write("{ not json");
    CHECK_THROWS_AS(load_catalog(path), std::invalid_argument);
    CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.json"), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("F^L,dag F^L - id has norm exactly t/N") {
    BoundSpec s;
    for (const auto& b : builtin_catalog())
        if (b.id == "FLdag_FL_id") s = b;
    for (int N : {4, 8})
        for (int t : {1, 2}) {
            const BoundCheck c = verify_bound(s, N, t);
            CHECK(c.measured == doctest::Approx(double(t) / N).epsilon(1e-9));
            CHECK(c.pass);
        }
}

TEST_CASE("trend judgement") {
    BoundSpec s;
    s.kind = BoundKind::Trend;
    const std::vector<int> N{4, 8, 16};
    CHECK(judge_trend(s, N, {0.8, 0.566, 0.4}).pass);
    CHECK_FALSE(judge_trend(s, N, {0.8, 0.9, 0.4}).monotone);
    // decreasing but too steep
    const TrendVerdict steep = judge_trend(s, N, {0.8, 0.2, 0.05});
    CHECK(steep.monotone);
    CHECK_FALSE(steep.pass);
    CHECK(steep.slope == doctest::Approx(-2.0));
}
