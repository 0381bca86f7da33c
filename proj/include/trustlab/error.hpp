#pragma once

#include <stdexcept>
#include <string>

namespace trustlab {

// Malformed input: bad payoffs, bad flags, schema violations. CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A quantity is mathematically undefined for the given input (zero
// denominator, singular design). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trustlab
