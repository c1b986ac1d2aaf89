#pragma once

// Helpers for tests that drive the command-line tool as a subprocess.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace topomap::testing {

inline std::string cli_path() { return TOPOMAP_CLI_PATH; }

/// Runs the tool with `args` (shell syntax), discarding stderr. Returns the
/// exit status.
inline int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = "'" + cli_path() + "' " + args + " > '" + stdout_path + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace topomap::testing
