#pragma once

#include <stdexcept>
#include <string>

namespace dmc {

// Machine-checkable reason attached to every library exception.
enum class ErrorCode {
  unknown_vertex,
  duplicate_vertex,
  self_loop,
  duplicate_edge,
  unknown_node,
  duplicate_node,
  not_a_cherry_leaf,
  no_cherry,
  invalid_pair,
  parse_error,
  wrong_seed_size,
  precondition_violation,
  boundary_params,
  bad_parameter,
  empty_input,
  all_zero_weights,
  seed_graph_input,
  size_guard,
  zero_variance,
  unlucky_start,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Text input failure with a 1-based line number (0 = whole file).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::parse_error,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dmc
