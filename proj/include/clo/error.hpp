#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace clo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input text could not be parsed; `pos` is a 0-based offset into the input.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " (at offset " + std::to_string(pos) + ")"), pos(pos) {}
  std::size_t pos;
};

/// A shuffle value was requested for a subset the algebra does not define.
struct ShuffleIncompleteError : Error {
  explicit ShuffleIncompleteError(std::vector<std::string> subset)
      : Error(describe(subset)), subset(std::move(subset)) {}
  std::vector<std::string> subset;

 private:
  static std::string describe(const std::vector<std::string>& s) {
    std::string out = "shuffle-incomplete: no value for subset {";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ", ";
      out += s[i];
    }
    out += "}";
    return out;
  }
};

/// A closure or enumeration would exceed the configured element budget.
struct BudgetError : Error {
  BudgetError(const std::string& what, std::size_t reached)
      : Error("budget exceeded in " + what + " (reached " +
              std::to_string(reached) + ")"),
        reached(reached) {}
  std::size_t reached;
};

/// A power body does not evaluate to an idempotent where one is required.
struct NotNormalizedError : Error {
  using Error::Error;
};

/// An input file does not match the expected schema.
struct SchemaError : Error {
  SchemaError(const std::string& msg, const std::string& where)
      : Error(msg + " [" + where + "]"), where(where) {}
  std::string where;
};

/// Element budget for closures and subset enumerations. Reads CLO_BUDGET
/// from the environment once; defaults to 100000.
std::size_t budget();

}  // namespace clo
