// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgap/bspline.hpp"
#include "dgap/charge_measure.hpp"
#include "dgap/multicenter.hpp"

namespace dgap {

//! Minimal TOML subset: [section] tables, [[section]] table arrays, scalar
//! values (number / string / boolean), nested numeric arrays, # comments.
//! Keys may contain dots (treated literally). Anything else is rejected.
struct TomlValue {
  enum class Kind { number, string, boolean, array };
  Kind kind = Kind::number;
  double num = 0.0;
  std::string str;
  bool flag = false;
  std::vector<TomlValue> items;
};

struct TomlTable {
  std::map<std::string, TomlValue> values;
};

struct TomlDoc {
  TomlTable root;
  std::map<std::string, TomlTable> sections;
  std::map<std::string, std::vector<TomlTable>> table_arrays;
};

TomlDoc parse_toml(const std::string &text);

//! Resolved run configuration; every field has a recorded default so output
//! provenance can list the effective numeric choices.
struct RunConfig {
  std::string command;

  // [[charge]]
  ChargeMeasure measure;
  bool has_measure = false;

  // [radial]
  RadialBasisSpec basis;
  std::vector<int> kappa_list{-1, 1, -2, 2};

  // [solver]
  int levels = 3;
  double tol = 1e-10;
  std::optional<double> cap;

  // [truncation]
  std::vector<double> truncation_caps;

  // [molecule] (+ basis.* and grid.* keys)
  std::optional<MoleculeSpec> molecule;
  MolecularBasisSpec mol_basis;
  MolecularGridSpec mol_grid;

  // [pes]
  std::vector<double> separations;
  double pes_tol = 1e-8;

  // [grid] (periodic spinor grid)
  int grid_n = 64;
  double grid_box = 30.0;
  double grid_cap = 1e4;
  int iterations = 600;

  // [verify]
  int trials = 120;
  double kato_constant = 1.5707963267948966;
  int localization_trials = 110;

  // [oracle]
  double oracle_nu = 0.5;
  std::vector<int> oracle_kappas{-1};
  int oracle_levels = 5;

  std::uint64_t seed = 1;
  std::string config_hash; // FNV-1a of the raw config text
};

//! Parse + validate a config for the given command. Unknown sections or keys
//! raise ValidationError (BadConfigKey).
RunConfig load_config(const std::string &path, const std::string &command);
RunConfig parse_config_text(const std::string &text, const std::string &command);

//! FNV-1a 64-bit hash, hex-encoded.
std::string fnv1a_hex(const std::string &text);

} // namespace dgap
