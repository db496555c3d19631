#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "qfilt/types.hpp"

namespace qfilt::csv {

/// Shortest decimal form that round-trips the exact double.
std::string format_double(Real v);

/// Line-oriented CSV writer with round-trip double formatting. Throws
/// std::runtime_error with the path on I/O failure.
class Writer {
 public:
  explicit Writer(const std::string& path);
  ~Writer();

  void header(const std::vector<std::string>& names);
  void begin_row();
  void field(Real v);
  void field(long long v);
  void field(const std::string& v);
  void end_row();
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  bool first_in_row_ = true;
  void sep();
};

}  // namespace qfilt::csv
