#pragma once

#include <string>
#include <utility>
#include <vector>

namespace twirlkit::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;

struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

/// A command's output: human lines, checks, and key=value pairs for the
/// machine section.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void line(const std::string& text) { lines_.push_back(text); }
  void key(const std::string& k, const std::string& v) { keys_.emplace_back(k, v); }
  void key(const std::string& k, double v);
  void check(const std::string& name, bool ok, const std::string& detail = "");
  void add(const std::vector<Check>& checks);

  bool ok() const;
  int exit_code() const { return ok() ? kExitPass : kExitFailure; }
  /// format is "human", "machine", or "both".
  std::string render(const std::string& format) const;

 private:
  std::string command_;
  std::vector<std::string> lines_;
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, std::string>> keys_;
};

struct Result {
  int exit_code = kExitPass;
  std::string out;
  std::string err;
};

/// Runs the command line (without the program name).
Result run(const std::vector<std::string>& args);

/// "%.12g".
std::string fmt(double v);

}  // namespace twirlkit::cli
