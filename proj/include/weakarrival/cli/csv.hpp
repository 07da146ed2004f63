#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace weakarrival::cli {

/// 17 significant digits, '.' decimal point, no locale dependence.
std::string format_number(double v);

/// Comma-separated rows terminated by LF. Fields are written verbatim, so
/// callers pass numbers through format_number.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& text);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace weakarrival::cli
