#include "ccg/errors.hpp"

namespace ccg {

ParseError::ParseError(std::size_t line, const std::string& what)
    : ValidationError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

}  // namespace ccg
