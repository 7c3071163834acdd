#pragma once

#include <stdexcept>
#include <string>

#include "memlab/ast.hpp"

namespace memlab {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int column);
  int line;
  int column;
};

CmdPtr parse_program(const std::string& text);
ExprPtr parse_expression(const std::string& text);

}  // namespace memlab
