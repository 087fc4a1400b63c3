#include "anykernel/errors.hpp"

namespace anykernel {

ProtocolError::ProtocolError(std::int64_t round, const std::string& what)
    : std::runtime_error("round " + std::to_string(round) + ": " + what), round_(round) {}

FormatError::FormatError(std::int64_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace anykernel
