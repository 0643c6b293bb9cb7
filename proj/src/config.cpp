// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include "dgap/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dgap/errors.hpp"

namespace dgap {

namespace {

[[noreturn]] void bad(const std::string &what) {
  throw ValidationError("BadConfig", what);
}

[[noreturn]] void bad_key(const std::string &where, const std::string &key) {
  throw ValidationError("BadConfigKey", "unknown key '" + key + "' in " + where);
}

std::string strip(const std::string &s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  return s.substr(a, b - a);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string &line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"')
      in_str = !in_str;
    else if (line[i] == '#' && !in_str)
      return line.substr(0, i);
  }
  return line;
}

TomlValue parse_value(const std::string &text, std::size_t &pos);

void skip_space(const std::string &text, std::size_t &pos) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
    ++pos;
}

TomlValue parse_array(const std::string &text, std::size_t &pos) {
  TomlValue v;
  v.kind = TomlValue::Kind::array;
  ++pos; // consume '['
  skip_space(text, pos);
  if (pos < text.size() && text[pos] == ']') {
    ++pos;
    return v;
  }
  while (true) {
    v.items.push_back(parse_value(text, pos));
    skip_space(text, pos);
    if (pos >= text.size())
      bad("unterminated array");
    if (text[pos] == ',') {
      ++pos;
      skip_space(text, pos);
      if (pos < text.size() && text[pos] == ']') { // trailing comma
        ++pos;
        return v;
      }
      continue;
    }
    if (text[pos] == ']') {
      ++pos;
      return v;
    }
    bad("expected ',' or ']' in array");
  }
}

TomlValue parse_value(const std::string &text, std::size_t &pos) {
  skip_space(text, pos);
  if (pos >= text.size())
    bad("missing value");
  TomlValue v;
  const char c = text[pos];
  if (c == '[')
    return parse_array(text, pos);
  if (c == '"') {
    v.kind = TomlValue::Kind::string;
    ++pos;
    while (pos < text.size() && text[pos] != '"')
      v.str.push_back(text[pos++]);
    if (pos >= text.size())
      bad("unterminated string");
    ++pos;
    return v;
  }
  // bare token: number or boolean
  std::size_t start = pos;
  while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
         text[pos] != ',' && text[pos] != ']')
    ++pos;
  const std::string tok = text.substr(start, pos - start);
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::boolean;
    v.flag = (tok == "true");
    return v;
  }
  try {
    std::size_t used = 0;
    v.num = std::stod(tok, &used);
    if (used != tok.size())
      bad("malformed number '" + tok + "'");
  } catch (const std::exception &) {
    bad("malformed value '" + tok + "'");
  }
  v.kind = TomlValue::Kind::number;
  return v;
}

bool valid_key(const std::string &k) {
  if (k.empty())
    return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  return true;
}

} // namespace

TomlDoc parse_toml(const std::string &text) {
  TomlDoc doc;
  TomlTable *current = &doc.root;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      const bool dbl = line.size() > 1 && line[1] == '[';
      const std::string close = dbl ? "]]" : "]";
      const std::size_t end = line.find(close);
      if (end == std::string::npos || strip(line.substr(end + close.size())) != "")
        bad("malformed section header at line " + std::to_string(lineno));
      const std::string name = strip(line.substr(dbl ? 2 : 1, end - (dbl ? 2 : 1)));
      if (!valid_key(name))
        bad("malformed section name at line " + std::to_string(lineno));
      if (dbl) {
        doc.table_arrays[name].emplace_back();
        current = &doc.table_arrays[name].back();
      } else {
        if (doc.sections.count(name))
          bad("duplicate section [" + name + "]");
        current = &doc.sections[name];
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = strip(line.substr(0, eq));
    if (!valid_key(key))
      bad("malformed key at line " + std::to_string(lineno));
    if (current->values.count(key))
      bad("duplicate key '" + key + "'");
    std::size_t pos = 0;
    const std::string rhs = strip(line.substr(eq + 1));
    TomlValue v = parse_value(rhs, pos);
    skip_space(rhs, pos);
    if (pos != rhs.size())
      bad("trailing content after value at line " + std::to_string(lineno));
    current->values.emplace(key, std::move(v));
  }
  return doc;
}

std::string fnv1a_hex(const std::string &text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

double need_num(const TomlTable &t, const std::string &key, double fallback) {
  auto it = t.values.find(key);
  if (it == t.values.end())
    return fallback;
  if (it->second.kind != TomlValue::Kind::number)
    bad("key '" + key + "' must be a number");
  return it->second.num;
}

int need_int(const TomlTable &t, const std::string &key, int fallback) {
  const double v = need_num(t, key, fallback);
  if (v != std::floor(v))
    bad("key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> need_num_list(const TomlTable &t, const std::string &key) {
  std::vector<double> out;
  auto it = t.values.find(key);
  if (it == t.values.end())
    return out;
  if (it->second.kind != TomlValue::Kind::array)
    bad("key '" + key + "' must be an array");
  for (const auto &v : it->second.items) {
    if (v.kind != TomlValue::Kind::number)
      bad("key '" + key + "' must hold numbers");
    out.push_back(v.num);
  }
  return out;
}

void check_keys(const TomlTable &t, const std::string &where,
                const std::vector<std::string> &allowed) {
  for (const auto &[key, value] : t.values) {
    bool ok = false;
    for (const auto &a : allowed)
      if (key == a)
        ok = true;
    if (!ok)
      bad_key(where, key);
  }
}

Vec3 need_vec3(const TomlTable &t, const std::string &key) {
  auto it = t.values.find(key);
  if (it == t.values.end() || it->second.kind != TomlValue::Kind::array ||
      it->second.items.size() != 3)
    bad("key '" + key + "' must be a 3-vector");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (it->second.items[static_cast<std::size_t>(i)].kind != TomlValue::Kind::number)
      bad("key '" + key + "' must hold numbers");
    v[i] = it->second.items[static_cast<std::size_t>(i)].num;
  }
  return v;
}

ChargeComponent parse_charge(const TomlTable &t) {
  check_keys(t, "[[charge]]", {"kind", "center", "weight", "radius", "pieces"});
  auto kind_it = t.values.find("kind");
  if (kind_it == t.values.end() || kind_it->second.kind != TomlValue::Kind::string)
    bad("[[charge]] needs kind = \"point\"|\"shell\"|\"ball\"|\"radial\"");
  const std::string kind = kind_it->second.str;
  const Vec3 center = t.values.count("center") ? need_vec3(t, "center") : Vec3::Zero();
  const double weight = need_num(t, "weight", 0.0);
  if (kind == "point") {
    return PointCharge{center, weight};
  }
  if (kind == "shell") {
    const double radius = need_num(t, "radius", 1.0);
    return SphericalShell{center, weight, radius};
  }
  if (kind == "ball") {
    const double radius = need_num(t, "radius", 1.0);
    return make_uniform_ball(center, weight, radius);
  }
  if (kind == "radial") {
    auto it = t.values.find("pieces");
    if (it == t.values.end() || it->second.kind != TomlValue::Kind::array)
      bad("radial charge needs pieces = [[r0, r1, c0, ...], ...]");
    RadialPiecewiseDensity d;
    d.center = center;
    for (const auto &row : it->second.items) {
      if (row.kind != TomlValue::Kind::array || row.items.size() < 3)
        bad("each radial piece needs [r0, r1, c0, ...]");
      RadialDensityPiece piece;
      piece.r0 = row.items[0].num;
      piece.r1 = row.items[1].num;
      for (std::size_t i = 2; i < row.items.size(); ++i)
        piece.coeffs.push_back(row.items[i].num);
      d.pieces.push_back(std::move(piece));
    }
    return d;
  }
  bad("unknown charge kind '" + kind + "'");
}

} // namespace

RunConfig parse_config_text(const std::string &text, const std::string &command) {
  const TomlDoc doc = parse_toml(text);
  RunConfig cfg;
  cfg.command = command;
  cfg.config_hash = fnv1a_hex(text);

  check_keys(doc.root, "top level", {"seed"});
  cfg.seed = static_cast<std::uint64_t>(need_num(doc.root, "seed", 1.0));

  static const std::vector<std::string> known_sections = {
      "radial", "solver", "truncation", "molecule", "pes", "grid", "verify", "oracle"};
  for (const auto &[name, table] : doc.sections) {
    bool ok = false;
    for (const auto &k : known_sections)
      if (name == k)
        ok = true;
    if (!ok)
      bad_key("config", "[" + name + "]");
  }
  for (const auto &[name, tables] : doc.table_arrays)
    if (name != "charge")
      bad_key("config", "[[" + name + "]]");

  if (auto it = doc.table_arrays.find("charge"); it != doc.table_arrays.end()) {
    for (const auto &t : it->second)
      cfg.measure.add(parse_charge(t));
    cfg.has_measure = true;
  }

  if (auto it = doc.sections.find("radial"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[radial]", {"r_max", "n_intervals", "order", "grading", "kappa_list"});
    cfg.basis.r_max = need_num(t, "r_max", cfg.basis.r_max);
    cfg.basis.n_intervals = need_int(t, "n_intervals", cfg.basis.n_intervals);
    cfg.basis.order = need_int(t, "order", cfg.basis.order);
    cfg.basis.grading = need_num(t, "grading", cfg.basis.grading);
    if (t.values.count("kappa_list")) {
      cfg.kappa_list.clear();
      for (double k : need_num_list(t, "kappa_list"))
        cfg.kappa_list.push_back(static_cast<int>(k));
    }
  }

  if (auto it = doc.sections.find("solver"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[solver]", {"levels", "tol", "cap"});
    cfg.levels = need_int(t, "levels", cfg.levels);
    cfg.tol = need_num(t, "tol", cfg.tol);
    if (t.values.count("cap"))
      cfg.cap = need_num(t, "cap", 0.0);
  }

  if (auto it = doc.sections.find("truncation"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[truncation]", {"caps"});
    cfg.truncation_caps = need_num_list(t, "caps");
  }

  if (auto it = doc.sections.find("molecule"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[molecule]",
               {"centers", "weights", "basis.J", "basis.beta", "basis.alpha0", "basis.l_max",
                "grid.radial_n", "grid.angular_n"});
    MoleculeSpec mol;
    auto cit = t.values.find("centers");
    if (cit == t.values.end() || cit->second.kind != TomlValue::Kind::array)
      bad("[molecule] needs centers = [[x,y,z], ...]");
    for (const auto &row : cit->second.items) {
      if (row.kind != TomlValue::Kind::array || row.items.size() != 3)
        bad("each center must be a 3-vector");
      mol.centers.push_back(Vec3(row.items[0].num, row.items[1].num, row.items[2].num));
    }
    mol.weights = need_num_list(t, "weights");
    cfg.molecule = std::move(mol);
    cfg.mol_basis.J = need_int(t, "basis.J", cfg.mol_basis.J);
    cfg.mol_basis.beta = need_num(t, "basis.beta", cfg.mol_basis.beta);
    cfg.mol_basis.alpha0 = need_num(t, "basis.alpha0", cfg.mol_basis.alpha0);
    cfg.mol_basis.l_max = need_int(t, "basis.l_max", cfg.mol_basis.l_max);
    cfg.mol_grid.radial_n = need_int(t, "grid.radial_n", cfg.mol_grid.radial_n);
    cfg.mol_grid.angular_n = need_int(t, "grid.angular_n", cfg.mol_grid.angular_n);
  }

  if (auto it = doc.sections.find("pes"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[pes]", {"separations", "tol"});
    cfg.separations = need_num_list(t, "separations");
    cfg.pes_tol = need_num(t, "tol", cfg.pes_tol);
  }

  if (auto it = doc.sections.find("grid"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[grid]", {"L", "N", "cap", "iterations", "seed"});
    cfg.grid_box = need_num(t, "L", cfg.grid_box);
    cfg.grid_n = need_int(t, "N", cfg.grid_n);
    cfg.grid_cap = need_num(t, "cap", cfg.grid_cap);
    cfg.iterations = need_int(t, "iterations", cfg.iterations);
    if (t.values.count("seed"))
      cfg.seed = static_cast<std::uint64_t>(need_num(t, "seed", 1.0));
  }

  if (auto it = doc.sections.find("verify"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[verify]", {"trials", "kato_constant", "localization_trials"});
    cfg.trials = need_int(t, "trials", cfg.trials);
    cfg.kato_constant = need_num(t, "kato_constant", cfg.kato_constant);
    cfg.localization_trials = need_int(t, "localization_trials", cfg.localization_trials);
  }

  if (auto it = doc.sections.find("oracle"); it != doc.sections.end()) {
    const TomlTable &t = it->second;
    check_keys(t, "[oracle]", {"nu", "kappa_list", "levels"});
    cfg.oracle_nu = need_num(t, "nu", cfg.oracle_nu);
    if (t.values.count("kappa_list")) {
      cfg.oracle_kappas.clear();
      for (double k : need_num_list(t, "kappa_list"))
        cfg.oracle_kappas.push_back(static_cast<int>(k));
    }
    cfg.oracle_levels = need_int(t, "levels", cfg.oracle_levels);
  }

  return cfg;
}

RunConfig load_config(const std::string &path, const std::string &command) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("BadConfig", "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), command);
}

} // namespace dgap
