#pragma once

#include "conewalk/config.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace conewalk {

/// Ordered key = value report. Reals are printed with %.12e, so equal runs
/// give byte-identical text.
class Summary {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void add(const std::string& key, long value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, bool value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses summary.txt text back into a key map.
std::map<std::string, std::string> parse_summary(const std::string& text);

/// The nonlinearity named by the config. Needs `eig` when lambda is given
/// relative to lambda1 / lambda2.
NonlinearitySpec make_spec(const RunConfig& cfg, const EigenResult* eig);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 stage failure
  Summary summary;
};

/// Runs cfg.command, writes summary.txt and the CSV / certificate artifacts
/// into cfg.out (created if missing). Progress lines go to `log`.
RunOutcome run(const RunConfig& cfg, std::ostream& log);

}  // namespace conewalk
