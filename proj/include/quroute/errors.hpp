#pragma once

#include <stdexcept>
#include <string>

namespace quroute {

// Exit codes used by the CLI: 0 success, 2 usage, 3 capacity, 4 IO.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitCapacity = 3,
  kExitIo = 4,
};

// A problem or circuit exceeds a hard resource limit (qubit caps, oracle
// sizes, brute-force instance sizes).
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A fleet or model cannot serve the requested problem at all.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// An action forbidden by the active masks was passed to step().
class illegal_action_error : public std::runtime_error {
 public:
  explicit illegal_action_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when feasible_actions() is queried on a terminal state.
class no_feasible_action_error : public std::runtime_error {
 public:
  explicit no_feasible_action_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace quroute
