#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "wavecrit/harness.hpp"
#include "wavecrit/scenario.hpp"
#include "wavecrit/toml_lite.hpp"

using namespace wavecrit;
using namespace wavecrit::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wavecrit-test-" + hex16(fnv1a64(std::to_string(std::rand()))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("toml") {
  TEST_CASE("sections, numbers, strings, booleans, arrays, comments") {
    const auto t = toml::parse(
        "name = \"base\"  # trailing comment\n"
        "flag = true\n"
        "[problem]\n"
        "n = 3\n"
        "p = 1.9\n"
        "[sweep]\n"
        "p = [1.5, 1.7, 1.9]\n"
        "tags = [\"a\", \"b\"]\n");
    CHECK(t.string("name") == std::string("base"));
    CHECK(t.boolean("flag") == true);
    CHECK(t.number("problem.n") == 3.0);
    CHECK(t.number("problem.p") == 1.9);
    REQUIRE(t.numbers("sweep.p").has_value());
    CHECK(t.numbers("sweep.p")->size() == 3);
    CHECK_FALSE(t.has("missing"));
  }

  TEST_CASE("malformed input raises validation errors with line numbers") {
    CHECK_THROWS_AS((void)toml::parse("key\n"), validation_error);
    CHECK_THROWS_AS((void)toml::parse("[unterminated\n"), validation_error);
    CHECK_THROWS_AS((void)toml::parse("x = \"open\n"), validation_error);
    CHECK_THROWS_AS((void)toml::parse("x = [1, \"a\"]\n"), validation_error);
  }
}

TEST_SUITE("harness") {
  TEST_CASE("scenario parsing picks up fields and defaults") {
    const auto sc = scenario_from_string(
        "name = \"demo\"\n"
        "solver = \"picard\"\n"
        "kappa = 1.5\n"
        "[problem]\n"
        "n = 3\np = 1.9\n"
        "[data]\n"
        "profile = \"algebraic\"\nepsilon = 1e-3\n"
        "[grid]\n"
        "dt = 0.5\ndr = 0.5\nt_max = 20\n");
    CHECK(sc.name == "demo");
    CHECK(sc.solver == SolverKind::Picard);
    CHECK(sc.problem.p == 1.9);
    CHECK(sc.data.profile == "algebraic");
    CHECK(sc.data.kappa == 1.5);  // inherited from the top-level kappa
    CHECK(sc.validate().empty());
  }

  TEST_CASE("validation lists the offending fields") {
    auto sc = scenario_from_string("solver = \"picard\"\n[problem]\np = 1.7\n");
    const auto errors = sc.validate();
    REQUIRE_FALSE(errors.empty());
    bool mentions_kappa = false;
    for (const auto& e : errors)
      if (e.find("kappa range empty") != std::string::npos) mentions_kappa = true;
    CHECK(mentions_kappa);

    auto bad = scenario_from_string("solver = \"fd\"\n[data]\nprofile = \"algebraic\"\n");
    bool mentions_profile = false;
    for (const auto& e : bad.validate())
      if (e.find("data.profile") != std::string::npos) mentions_profile = true;
    CHECK(mentions_profile);
  }

  TEST_CASE("unknown solvers and profiles are rejected") {
    CHECK_THROWS_AS((void)scenario_from_string("solver = \"magic\"\n"), validation_error);
    auto sc = scenario_from_string("solver = \"linear\"\n[data]\nprofile = \"?\"\n");
    CHECK_THROWS_AS((void)sc.data.build(), validation_error);
  }

  TEST_CASE("scenario hash is stable and sensitive to parameters") {
    auto a = scenario_from_string("solver = \"linear\"\n[problem]\np = 1.9\n");
    auto b = a;
    CHECK(a.hash() == b.hash());
    b.problem.p = 2.0;
    CHECK(a.hash() != b.hash());
  }

  TEST_CASE("zero scenario produces a zero norm and a manifest") {
    TempDir tmp;
    auto sc = scenario_from_string(
        "name = \"zero\"\nsolver = \"linear\"\n[grid]\nt_max = 4\ndt = 1\ndr = 1\n");
    const auto man = run(sc, tmp.path);
    CHECK(man.status == "ok");
    CHECK(man.measurements.at("norm_total") == 0.0);
    CHECK(fs::exists(fs::path(man.directory) / "field.csv"));
    CHECK(fs::exists(fs::path(man.directory) / "norm.json"));
    CHECK(fs::exists(fs::path(man.directory) / "manifest.json"));
  }

  TEST_CASE("replaying a scenario reproduces byte-identical outputs") {
    TempDir tmp1, tmp2;
    const char* text =
        "name = \"replay\"\nsolver = \"linear\"\nkappa = 1.5\n"
        "[data]\nprofile = \"algebraic\"\nepsilon = 0.01\n"
        "[grid]\nt_max = 6\ndt = 0.5\ndr = 0.5\n";
    const auto man1 = run(scenario_from_string(text), tmp1.path);
    const auto man2 = run(scenario_from_string(text), tmp2.path);
    CHECK(slurp(fs::path(man1.directory) / "field.csv") ==
          slurp(fs::path(man2.directory) / "field.csv"));
    CHECK(slurp(fs::path(man1.directory) / "norm.json") ==
          slurp(fs::path(man2.directory) / "norm.json"));
  }

  TEST_CASE("picard scenario with an empty kappa range fails validation") {
    TempDir tmp;
    auto sc = scenario_from_string(
        "solver = \"picard\"\n[problem]\np = 1.7\n[data]\nprofile = \"algebraic\"\nepsilon = 1e-3\n");
    CHECK_THROWS_AS((void)run(sc, tmp.path), validation_error);
  }

  TEST_CASE("classify and transform emitters") {
    auto sc = scenario_from_string(
        "solver = \"classify\"\n[problem]\nn = 3\nmu = 2\nm = 0\np = 1.5\nform = \"damped\"\n");
    const auto j = classify_json(sc);
    CHECK(j["regime"] == "blow-up");
    sc.transform = "dissipation-shift";
    const auto tj = transform_json(sc);
    CHECK(tj["output"]["mu"] == 0.0);
    CHECK(tj["data_map"]["c"] == 1.0);
  }

  TEST_CASE("exponents table carries values and citations") {
    const auto sc = scenario_from_string("solver = \"exponents\"\n[problem]\nn = 3\nmu = 2\n");
    const auto j = exponents_table(sc);
    REQUIRE(j.contains("table"));
    bool saw_p2 = false;
    for (const auto& row : j["table"]) {
      CHECK(row.contains("citation"));
      if (row["name"] == "p2" && row["args"]["n"] == 3) {
        saw_p2 = true;
        CHECK(std::abs(row["value"].get<double>() - 1.7807764064044151) < 1e-12);
      }
    }
    CHECK(saw_p2);
  }

  TEST_CASE("sweep expands axes, isolates failures, writes one summary") {
    TempDir tmp;
    auto base = scenario_from_string(
        "name = \"sw\"\nsolver = \"picard\"\nkappa = 1.5\n"
        "[problem]\nn = 3\np = 1.9\n"
        "[data]\nprofile = \"bump\"\nheight = 1e-3\nradius = 1\n"
        "[grid]\ndt = 0.5\ndr = 0.5\nt_max = 5\nr_max = 6\n"
        "[sweep]\np = [1.7, 1.9]\n");
    const auto result = sweep(base, tmp.path, 2);
    REQUIRE(result.manifests.size() == 2);
    // p = 1.7 sits below p0(5): that run fails validation, the other runs.
    CHECK(result.manifests[0].status == "validation-error");
    CHECK(result.manifests[1].status == "ok");
    CHECK(fs::exists(result.summary_path));
    const std::string summary = slurp(result.summary_path);
    CHECK(summary.find("validation-error") != std::string::npos);
    CHECK(summary.find("sw-p=1.7") != std::string::npos);
  }

  TEST_CASE("sweep reuses content-addressed runs when resuming") {
    TempDir tmp;
    auto base = scenario_from_string(
        "name = \"resume\"\nsolver = \"linear\"\nkappa = 1.5\n"
        "[data]\nprofile = \"algebraic\"\nepsilon = 0.1\n"
        "[grid]\ndt = 1\ndr = 1\nt_max = 4\n");
    const auto first = sweep(base, tmp.path, 1);
    REQUIRE(first.manifests.size() == 1);
    const auto field = fs::path(first.manifests[0].directory) / "field.csv";
    const auto stamp1 = fs::last_write_time(field);
    const auto second = sweep(base, tmp.path, 1);
    CHECK(second.manifests[0].status == "ok");
    CHECK(fs::last_write_time(field) == stamp1);  // not recomputed
  }

  TEST_CASE("epsilon sweep keeps the linear norm ratio constant within 5%") {
    TempDir tmp;
    auto base = scenario_from_string(
        "name = \"eps\"\nsolver = \"linear\"\nkappa = 1.5\n"
        "[data]\nprofile = \"algebraic\"\nepsilon = 0.1\n"
        "[grid]\ndt = 0.5\ndr = 0.5\nt_max = 10\nr_max = 12\n"
        "[sweep]\nepsilon = [0.1, 0.01, 0.001]\n");
    const auto result = sweep(base, tmp.path, 1);
    REQUIRE(result.manifests.size() == 3);
    double lo = kInf, hi = 0.0;
    for (const auto& man : result.manifests) {
      REQUIRE(man.status == "ok");
      const double ratio = man.measurements.at("norm_per_amplitude");
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo <= 1.05);
  }

  TEST_CASE("expand_sweep without axes is the base scenario") {
    const auto base = scenario_from_string("name = \"single\"\nsolver = \"linear\"\n");
    const auto list = expand_sweep(base);
    REQUIRE(list.size() == 1);
    CHECK(list[0].name == "single");
  }
}
