#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "arcade/run/run.hpp"

namespace arcade::run {

class CorruptLog : public std::runtime_error {
 public:
  CorruptLog(std::size_t line, const std::string& what)
      : std::runtime_error("run log line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LogOptions {
  /// Wall-clock fields are written as zero so logs of identical runs compare byte for byte.
  bool include_wall_clock = true;
};

/// One JSON object per line: header, one line per turn, footer.
std::string header_line(const RunHeader& header, const LogOptions& options = {});
std::string turn_line(const TurnRecord& turn, const LogOptions& options = {});
std::string footer_line(const RunFooter& footer, const LogOptions& options = {});

void write_log(const RunRecord& record, std::ostream& out, const LogOptions& options = {});
/// Throws CorruptLog on malformed lines, a missing header or footer, or out-of-order steps.
RunRecord read_log(std::istream& in);
RunRecord read_log_file(const std::filesystem::path& path);

/// Streams a run to `out` as it happens: each turn is flushed before the next begins.
RunHooks streaming_hooks(std::ostream& out, const LogOptions& options = {});

}  // namespace arcade::run
