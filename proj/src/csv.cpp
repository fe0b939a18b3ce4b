#include "bgkimex/csv.hpp"

#include <cstdio>

namespace bgkimex {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw SolverError("cannot open output file '" + path + "'");
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void CsvWriter::sep() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

CsvWriter& CsvWriter::field(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(int v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(const std::string& v) {
  sep();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_in_row_ = true;
}

}  // namespace bgkimex
