#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "taillab/common.hpp"

namespace taillab {

// CSV writer with the versioned schema comment line and a fixed numeric
// format, so identical inputs give byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns) {
    out_.open(path);
    if (!out_) throw ValidationError("CsvWriter: cannot open " + path.string());
    out_ << "# schema=1\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }

  void row(std::initializer_list<double> values) {
    std::size_t i = 0;
    for (double v : values) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      out_ << buf << (++i < values.size() ? "," : "\n");
    }
  }

 private:
  std::ofstream out_;
};

}  // namespace taillab
