// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "dgap/config.hpp"

namespace dgap {

struct RunOutcome {
  int exit_code = 0;
  std::string message;
};

RunOutcome run_spectrum(const RunConfig &cfg, const std::string &out_dir, int threads);
RunOutcome run_pes(const RunConfig &cfg, const std::string &out_dir, int threads);
RunOutcome run_verify(const RunConfig &cfg, const std::string &out_dir, int threads);
RunOutcome run_bsnorm(const RunConfig &cfg, const std::string &out_dir, int threads);
RunOutcome run_oracle(const RunConfig &cfg, const std::string &out_dir, int threads);

//! Load config, dispatch the subcommand, map errors to the exit-code
//! contract (0 ok, 2 validation, 3 solver, 4 verification) and print the
//! outcome message to stdout.
int run_command(const std::string &command, const std::string &config_path,
                const std::string &out_dir, std::optional<std::uint64_t> seed_override,
                int threads);

//! Deterministic parallel map over [0, n): tasks may run in any order but
//! results must be stored by index; the first exception (by index) rethrows.
void parallel_for(int n, int threads, const std::function<void(int)> &fn);

} // namespace dgap
