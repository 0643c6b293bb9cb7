// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dgap/runner.hpp"

int main(int argc, char **argv) {
  CLI::App app{"gapwork: gap eigenvalues of Coulomb-like Dirac operators"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  unsigned long long seed_value = 0;
  int threads = 1;

  const struct {
    const char *name;
    const char *help;
  } subs[] = {
      {"spectrum", "gap levels of a radial charge measure"},
      {"pes", "lowest level along a multicenter separation sweep"},
      {"verify", "seeded inequality margin suite"},
      {"bsnorm", "Birman-Schwinger norm estimate on the periodic grid"},
      {"oracle", "shooting reference levels against the closed form"},
  };
  for (const auto &s : subs) {
    CLI::App *sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "TOML run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (created if absent)");
    sub->add_option("--seed", seed_value, "override the config seed");
    sub->add_option("--threads", threads, "worker threads for trial sweeps")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App *sub = app.get_subcommands().front();
  std::optional<std::uint64_t> seed_override;
  if (sub->count("--seed") > 0)
    seed_override = static_cast<std::uint64_t>(seed_value);

  return dgap::run_command(sub->get_name(), config_path, out_dir, seed_override, threads);
}
