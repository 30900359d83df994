#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace mlsim::csv {

/// Fixed-format double for byte-stable CSV output.
std::string num(double v, int precision = 10);
std::string num(std::optional<double> v, int precision = 10);

/// Minimal CSV writer: '#'-prefixed comment lines for units, then a header
/// row, then data rows.
class Writer {
public:
  explicit Writer(const std::string& path);
  void comment(const std::string& text);
  void row(const std::vector<std::string>& fields);
  bool ok() const { return static_cast<bool>(out_); }

private:
  std::ofstream out_;
};

/// Tiny reader used by audits: returns all non-comment rows split on commas.
std::vector<std::vector<std::string>> read_rows(const std::string& path);

}  // namespace mlsim::csv
