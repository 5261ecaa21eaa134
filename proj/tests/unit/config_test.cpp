#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "ddl/config.hpp"
#include "ddl/errors.hpp"
#include "ddl/experiments.hpp"
#include "json.hpp"

using namespace ddl;
namespace fs = std::filesystem;

TEST_CASE("typed values, comments and arrays") {
    const Config c = Config::parse(
        "experiment = simulate  # trailing comment\n"
        "# full-line comment\n"
        "[solver]\n"
        "dt = 1e-3\n"
        "record_every = 7\n"
        "adaptive_dt = false\n"
        "[profile]\n"
        "c0 = inf\n"
        "table_r = [0.1, 1, 10]\n"
        "name = \"two words\"\n");
    CHECK(c.get_string("", "experiment") == "simulate");
    CHECK(c.get_double("solver", "dt") == doctest::Approx(1e-3));
    CHECK(c.get_int("solver", "record_every") == 7);
    CHECK(c.get_double("solver", "record_every") == 7.0);
    CHECK_FALSE(c.get_bool("solver", "adaptive_dt", true));
    CHECK(std::isinf(c.get_double("profile", "c0")));
    CHECK(c.get_array("profile", "table_r") == std::vector<double>{0.1, 1.0, 10.0});
    CHECK(c.get_string("profile", "name") == "two words");
    CHECK(c.get_double("solver", "cfl_safety", 0.5) == 0.5);
    CHECK_FALSE(c.get_optional("solver", "missing").has_value());
    CHECK(c.has_section("profile"));
    CHECK_FALSE(c.has("grid", "N"));
}

TEST_CASE("malformed text and type mismatches are validation errors") {
    CHECK_THROWS_AS(Config::parse("[solver]\ndt = 1\ndt = 2\n"), ArgumentError);
    CHECK_THROWS_AS(Config::parse("[solver\n"), ArgumentError);
    CHECK_THROWS_AS(Config::parse("just text\n"), ArgumentError);
    const Config c = Config::parse("[solver]\ndt = fast\n");
    CHECK_THROWS_AS(c.get_double("solver", "dt"), ArgumentError);
    CHECK_THROWS_AS(c.get_double("solver", "t_end"), ArgumentError);
    CHECK_THROWS_AS(Config::load("/nonexistent/run.cfg"), ArgumentError);
}

TEST_CASE("unused keys are reported") {
    const Config c = Config::parse("[solver]\ndt = 1e-3\ntypo_key = 3\n");
    c.get_double("solver", "dt");
    CHECK(c.unused_keys() == std::vector<std::string>{"solver.typo_key"});
}

TEST_CASE("dump parses back to the same values") {
    Config c = Config::parse("a = 1\n[x]\nb = [1, 2.5]\nc = true\nd = word\n");
    c.set("x", "e", 0.125);
    const Config r = Config::parse(c.dump());
    CHECK(r.get_int("", "a") == 1);
    CHECK(r.get_array("x", "b") == std::vector<double>{1.0, 2.5});
    CHECK(r.get_bool("x", "c", false));
    CHECK(r.get_string("x", "d") == "word");
    CHECK(r.get_double("x", "e") == 0.125);
}

TEST_CASE("splitmix stream") {
    SplitMix64 a(0);
    CHECK(a.next() == 0xE220A8397B1DCDAFull);
    CHECK(a.next() == 0x6E789E6AA1B965F4ull);
    SplitMix64 b(42), c(42);
    for (int i = 0; i < 100; ++i) CHECK(b.next() == c.next());
    SplitMix64 r(7);
    double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("random band field is deterministic and scaled") {
    PeriodicGrid g(2, 32);
    const Field a = random_band_field(g, 2, 6, 1.0, 0.5, 123), b = random_band_field(g, 2, 6, 1.0, 0.5, 123);
    CHECK(a.values() == b.values());
    CHECK(norm_linf(a) == doctest::Approx(0.5));
    const auto& s = a.spectral();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = g.kmag(i);
        if (k < 2.0 || k > 6.0) CHECK(std::abs(s[i]) < 1e-14);
    }
    CHECK(random_band_field(g, 2, 6, 1.0, 0.5, 124).values() != a.values());
}

TEST_CASE("builders validate their sections") {
    CHECK_THROWS_AS(grid_from_config(Config::parse("[grid]\nd = 3\nN = 16\n")), ArgumentError);
    CHECK_THROWS_AS(profile_from_config(Config::parse("[profile]\nfamily = power\nalpha = 1.5\n")), ArgumentError);
    CHECK_THROWS_AS(model_from_config(Config::parse("[model]\nkind = sqg\n"), 1), ArgumentError);
    const auto g = grid_from_config(Config::parse("[grid]\nd = 2\nN = 16\n"));
    CHECK(g.size() == 256);
    const auto sc = solver_from_config(Config::parse("[solver]\ndt = 0.01\nt_end = 2\n"));
    CHECK(sc.t_end == 2.0);
}

TEST_CASE("simulate run writes a manifest") {
    const fs::path dir = fs::temp_directory_path() / "ddl_unit_run";
    fs::remove_all(dir);
    const Config c = Config::parse(
        "[grid]\nd = 1\nN = 64\n[profile]\nfamily = power\nalpha = 1.0\n"
        "[solver]\ndt = 1e-2\nt_end = 0.1\nrecord_every = 2\n");
    CHECK(run_experiment("simulate", c, {dir.string(), 5, true}) == exit_pass);
    std::ifstream in(dir / "manifest.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["experiment"] == "simulate");
    CHECK(j["seed"] == 5);
    CHECK(j["recipe"] == "drift-diffusion-burgers");
    CHECK(j["exit_code"] == 0);
    CHECK(fs::exists(dir / "diagnostics.csv"));

    const fs::path bad = fs::temp_directory_path() / "ddl_unit_bad";
    fs::remove_all(bad);
    CHECK(run_experiment("simulate", Config::parse("[grid]\nd = 1\nN = 7\n"), {bad.string(), 1, true}) ==
          exit_validation);
    std::ifstream bin(bad / "manifest.json");
    CHECK(nlohmann::json::parse(bin)["error"]["kind"] == "validation");

    const fs::path rep = fs::temp_directory_path() / "ddl_unit_report";
    CHECK(report({dir.string(), (fs::temp_directory_path() / "ddl_missing").string()}, rep.string(), true) == exit_pass);
    std::ifstream rin(rep / "summary.json");
    const auto s = nlohmann::json::parse(rin);
    CHECK(s["skipped"].size() == 1);
    fs::remove_all(dir);
    fs::remove_all(bad);
    fs::remove_all(rep);
}
