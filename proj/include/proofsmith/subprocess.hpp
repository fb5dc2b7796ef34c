#ifndef PROOFSMITH_SUBPROCESS_HPP
#define PROOFSMITH_SUBPROCESS_HPP

#include <string>
#include <vector>

namespace proofsmith {

struct RunResult {
  int exit_code = -1;
  bool timed_out = false;
  bool launch_failed = false;
  std::string out;
  std::string err;
};

// Runs argv[0] with the given arguments, capturing stdout and stderr. Kills
// the process after timeout_seconds (0 = no limit).
RunResult run_process(const std::vector<std::string> &argv,
                      int timeout_seconds);

} // namespace proofsmith

#endif
