// Copyright (c) the gapwork developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dgap {

// Exit-code categories used by the command-line runner.
//   validation   -> 2  (rejected inputs, malformed configs, precondition breaks)
//   solver       -> 3  (numerical failure inside an otherwise valid run)
//   verification -> 4  (an inequality check that should hold was violated)
enum class ErrorCategory { validation = 2, solver = 3, verification = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, std::string name, const std::string &what)
      : std::runtime_error(name + ": " + what), cat_(cat), name_(std::move(name)) {}

  ErrorCategory category() const noexcept { return cat_; }
  const std::string &name() const noexcept { return name_; }

private:
  ErrorCategory cat_;
  std::string name_;
};

class ValidationError : public Error {
public:
  ValidationError(std::string name, const std::string &what)
      : Error(ErrorCategory::validation, std::move(name), what) {}
};

class SolverError : public Error {
public:
  SolverError(std::string name, const std::string &what)
      : Error(ErrorCategory::solver, std::move(name), what) {}
};

class VerificationError : public Error {
public:
  VerificationError(std::string name, const std::string &what)
      : Error(ErrorCategory::verification, std::move(name), what) {}
};

} // namespace dgap
