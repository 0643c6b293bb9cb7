// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "dgap/config.hpp"
#include "dgap/errors.hpp"
#include "doctest.h"

using namespace dgap;

TEST_CASE("toml subset parses tables, arrays and scalars") {
  const std::string text = "# comment\n"
                           "seed = 42\n"
                           "\n"
                           "[solver]\n"
                           "levels = 4 # trailing comment\n"
                           "tol = 1e-9\n"
                           "\n"
                           "[molecule]\n"
                           "centers = [[0, 0, 0], [1.4, 0, 0]]\n"
                           "basis.J = 12\n"
                           "\n"
                           "[[charge]]\n"
                           "kind = \"point\"\n"
                           "weight = 0.5\n"
                           "\n"
                           "[[charge]]\n"
                           "kind = \"shell\"\n"
                           "weight = 0.25\n"
                           "radius = 2.0\n";
  const TomlDoc doc = parse_toml(text);
  CHECK(doc.root.values.at("seed").num == 42.0);
  CHECK(doc.sections.at("solver").values.at("levels").num == 4.0);
  CHECK(doc.sections.at("solver").values.at("tol").num == doctest::Approx(1e-9));
  CHECK(doc.sections.at("molecule").values.at("basis.J").num == 12.0);
  const TomlValue &centers = doc.sections.at("molecule").values.at("centers");
  REQUIRE(centers.kind == TomlValue::Kind::array);
  REQUIRE(centers.items.size() == 2);
  CHECK(centers.items[1].items[0].num == doctest::Approx(1.4));
  REQUIRE(doc.table_arrays.at("charge").size() == 2);
  CHECK(doc.table_arrays.at("charge")[1].values.at("kind").str == "shell");

  const TomlDoc flags = parse_toml("a = true\nb = false\nc = \"text\"\n");
  CHECK(flags.root.values.at("a").flag);
  CHECK_FALSE(flags.root.values.at("b").flag);
  CHECK(flags.root.values.at("c").str == "text");
}

TEST_CASE("malformed toml is rejected with a line number") {
  CHECK_THROWS_WITH_AS(parse_toml("[unterminated\n"), doctest::Contains("line 1"),
                       ValidationError);
  CHECK_THROWS_AS(parse_toml("key without equals\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("x = \"unterminated\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("[a]\nk = 1\n[a]\n"), ValidationError);
}

TEST_CASE("defaults survive an empty config") {
  const RunConfig cfg = parse_config_text("", "spectrum");
  CHECK(cfg.command == "spectrum");
  CHECK_FALSE(cfg.has_measure);
  CHECK(cfg.basis.r_max == doctest::Approx(40.0));
  CHECK(cfg.basis.n_intervals == 200);
  CHECK(cfg.basis.order == 6);
  CHECK(cfg.kappa_list == std::vector<int>{-1, 1, -2, 2});
  CHECK(cfg.levels == 3);
  CHECK(cfg.tol == doctest::Approx(1e-10));
  CHECK_FALSE(cfg.cap.has_value());
  CHECK(cfg.truncation_caps.empty());
  CHECK_FALSE(cfg.molecule.has_value());
  CHECK(cfg.mol_basis.J == 10);
  CHECK(cfg.mol_grid.radial_n == 80);
  CHECK(cfg.separations.empty());
  CHECK(cfg.grid_n == 64);
  CHECK(cfg.grid_box == doctest::Approx(30.0));
  CHECK(cfg.trials == 120);
  CHECK(cfg.localization_trials == 110);
  CHECK(cfg.kato_constant == doctest::Approx(1.5707963267948966));
  CHECK(cfg.oracle_nu == doctest::Approx(0.5));
  CHECK(cfg.oracle_kappas == std::vector<int>{-1});
  CHECK(cfg.oracle_levels == 5);
  CHECK(cfg.seed == 1);
  CHECK(cfg.config_hash == "cbf29ce484222325");
}

TEST_CASE("charge components of every kind resolve into the measure") {
  const std::string text = "[[charge]]\n"
                           "kind = \"point\"\n"
                           "center = [0, 0, 0]\n"
                           "weight = 0.3\n"
                           "[[charge]]\n"
                           "kind = \"shell\"\n"
                           "weight = 0.2\n"
                           "radius = 1.5\n"
                           "[[charge]]\n"
                           "kind = \"ball\"\n"
                           "center = [0.5, 0, 0]\n"
                           "weight = 0.1\n"
                           "radius = 0.4\n"
                           "[[charge]]\n"
                           "kind = \"radial\"\n"
                           "weight = 0\n"
                           "pieces = [[0.0, 1.0, 0.07957747154594767]]\n";
  const RunConfig cfg = parse_config_text(text, "spectrum");
  REQUIRE(cfg.has_measure);
  REQUIRE(cfg.measure.components().size() == 4);
  // 0.3 + 0.2 + 0.1 + 4 pi integral of c r^2 on [0, 1] with c = 1/(4 pi) / (1/3).
  CHECK(cfg.measure.total_charge() == doctest::Approx(0.9333333333).epsilon(1e-6));

  CHECK_THROWS_WITH_AS(
      parse_config_text("[[charge]]\nkind = \"cube\"\nweight = 0.1\n", "spectrum"),
      doctest::Contains("charge kind"), ValidationError);
  CHECK_THROWS_AS(parse_config_text("[[charge]]\nweight = 0.1\n", "spectrum"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_config_text("[[charge]]\nkind = \"point\"\nweight = 0.1\ncenter = [1, 2]\n",
                        "spectrum"),
      ValidationError);
}

TEST_CASE("unknown sections and keys are named in the error") {
  CHECK_THROWS_WITH_AS(parse_config_text("[nonsense]\nx = 1\n", "spectrum"),
                       doctest::Contains("BadConfigKey"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("[solver]\nlevles = 3\n", "spectrum"),
                       doctest::Contains("levles"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("toplevel_key = 1\n", "spectrum"),
                       doctest::Contains("toplevel_key"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config_text("[[charges]]\nkind = \"point\"\n", "spectrum"),
                       doctest::Contains("charges"), ValidationError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[[charge]]\nkind = \"point\"\nweight = 0.1\nradius = 1\nvolume = 2\n",
                        "spectrum"),
      doctest::Contains("volume"), ValidationError);
}

TEST_CASE("sections override the matching fields") {
  const std::string text = "seed = 7\n"
                           "[radial]\n"
                           "r_max = 60\n"
                           "n_intervals = 200\n"
                           "order = 7\n"
                           "grading = 1.5\n"
                           "kappa_list = [-1, -2]\n"
                           "[solver]\n"
                           "levels = 2\n"
                           "cap = 500\n"
                           "[truncation]\n"
                           "caps = [10, 100, 1000]\n"
                           "[molecule]\n"
                           "centers = [[0, 0, 0], [1, 0, 0]]\n"
                           "weights = [0.45, 0.45]\n"
                           "basis.J = 8\n"
                           "basis.beta = 2.5\n"
                           "basis.alpha0 = 0.05\n"
                           "basis.l_max = 2\n"
                           "grid.radial_n = 60\n"
                           "grid.angular_n = 70\n"
                           "[pes]\n"
                           "separations = [0.5, 1.0, 2.0]\n"
                           "tol = 1e-7\n"
                           "[grid]\n"
                           "L = 24\n"
                           "N = 48\n"
                           "cap = 2000\n"
                           "iterations = 300\n"
                           "[verify]\n"
                           "trials = 10\n"
                           "kato_constant = 1.0\n"
                           "localization_trials = 5\n"
                           "[oracle]\n"
                           "nu = 0.9\n"
                           "kappa_list = [-1, 1, -2]\n"
                           "levels = 4\n";
  const RunConfig cfg = parse_config_text(text, "pes");
  CHECK(cfg.seed == 7);
  CHECK(cfg.basis.r_max == doctest::Approx(60.0));
  CHECK(cfg.basis.n_intervals == 200);
  CHECK(cfg.basis.order == 7);
  CHECK(cfg.basis.grading == doctest::Approx(1.5));
  CHECK(cfg.kappa_list == std::vector<int>{-1, -2});
  CHECK(cfg.levels == 2);
  REQUIRE(cfg.cap.has_value());
  CHECK(*cfg.cap == doctest::Approx(500.0));
  CHECK(cfg.truncation_caps == std::vector<double>{10.0, 100.0, 1000.0});
  REQUIRE(cfg.molecule.has_value());
  CHECK(cfg.molecule->size() == 2);
  CHECK(cfg.molecule->weights[1] == doctest::Approx(0.45));
  CHECK(cfg.mol_basis.J == 8);
  CHECK(cfg.mol_basis.beta == doctest::Approx(2.5));
  CHECK(cfg.mol_basis.alpha0 == doctest::Approx(0.05));
  CHECK(cfg.mol_basis.l_max == 2);
  CHECK(cfg.mol_grid.radial_n == 60);
  CHECK(cfg.mol_grid.angular_n == 70);
  CHECK(cfg.separations == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(cfg.pes_tol == doctest::Approx(1e-7));
  CHECK(cfg.grid_box == doctest::Approx(24.0));
  CHECK(cfg.grid_n == 48);
  CHECK(cfg.grid_cap == doctest::Approx(2000.0));
  CHECK(cfg.iterations == 300);
  CHECK(cfg.trials == 10);
  CHECK(cfg.kato_constant == doctest::Approx(1.0));
  CHECK(cfg.localization_trials == 5);
  CHECK(cfg.oracle_nu == doctest::Approx(0.9));
  CHECK(cfg.oracle_kappas == std::vector<int>{-1, 1, -2});
  CHECK(cfg.oracle_levels == 4);
  CHECK(cfg.config_hash == fnv1a_hex(text));
}

TEST_CASE("fnv1a hash matches the reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a_hex("x") != fnv1a_hex("y"));
}

TEST_CASE("load_config reports unreadable paths") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/path/run.toml", "spectrum"),
                       doctest::Contains("cannot open"), ValidationError);
}
