#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "bgkimex/errors.hpp"

namespace bgkimex {

/// Minimal CSV writer: header row, %.17g floats (lossless double round-trip),
/// deterministic byte output.
class CsvWriter {
public:
  explicit CsvWriter(const std::string& path);

  void header(const std::vector<std::string>& names);
  CsvWriter& field(double v);
  CsvWriter& field(int v);
  CsvWriter& field(const std::string& v);
  void end_row();

private:
  std::ofstream out_;
  bool first_in_row_ = true;
  void sep();
};

std::string format_double(double v);

}  // namespace bgkimex
