#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <anykernel/kernel.hpp>
#include <anykernel/vector.hpp>

namespace shipped {

struct ScalarCase {
  std::string name;
  anykernel::Kernel kernel;
  std::function<anykernel::Point(std::mt19937_64&)> sample;
};

struct MatrixCase {
  std::string name;
  anykernel::MatrixKernel kernel;
  std::function<anykernel::VectorPoint(std::mt19937_64&)> sample;
};

// Every catalog kernel, combinator, graph kernel and builder output, each with a matching sampler.
std::vector<ScalarCase> scalar_cases();
std::vector<MatrixCase> matrix_cases();

}  // namespace shipped
