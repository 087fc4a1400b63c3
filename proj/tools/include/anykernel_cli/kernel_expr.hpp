#pragma once

#include <optional>
#include <string>

#include <anykernel/graph.hpp>
#include <anykernel/kernel.hpp>

namespace anykernel::cli {

struct KernelContext {
  std::optional<GroupFamily> groups;
};

// Parses "(sum (sobolev) (scale 2 (grid 10)))" and the bare preset names
// calibration, multicalibration, online-regression.
// Throws ConfigError naming the column of the offending token.
Kernel parse_kernel(const std::string& expr, const KernelContext& ctx = {});

}  // namespace anykernel::cli
