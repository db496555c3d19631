#include "qfilt/csv.hpp"

#include <charconv>

namespace qfilt::csv {

std::string format_double(Real v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::string& path) : out_(path), path_(path) {
  if (!out_) {
    throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  }
}

Writer::~Writer() {
  if (out_.is_open()) {
    out_.flush();
  }
}

void Writer::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void Writer::begin_row() { first_in_row_ = true; }

void Writer::sep() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

void Writer::field(Real v) {
  sep();
  out_ << format_double(v);
}

void Writer::field(long long v) {
  sep();
  out_ << v;
}

void Writer::field(const std::string& v) {
  sep();
  out_ << v;
}

void Writer::end_row() { out_ << '\n'; }

void Writer::close() {
  out_.flush();
  if (!out_) {
    throw std::runtime_error("csv: write to '" + path_ + "' failed");
  }
  out_.close();
}

}  // namespace qfilt::csv
