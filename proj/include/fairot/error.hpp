#pragma once

#include <stdexcept>
#include <string>

namespace fairot {

// Malformed or out-of-contract input (bad CSV, unknown group, empty sample).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical contract was violated (degenerate weights, undefined ratio).
class NumericalError : public std::domain_error {
 public:
  explicit NumericalError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace fairot
