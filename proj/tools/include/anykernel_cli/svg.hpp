#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anykernel::cli {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

// Log-log line chart; nonpositive values are dropped.
void write_loglog_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

}  // namespace anykernel::cli
