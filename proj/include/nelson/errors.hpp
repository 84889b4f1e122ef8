#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nelson {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation at (or too close to) a node of the wavefunction, where the
// forward drift or the logarithm of the density blows up.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double location, std::ptrdiff_t node_index = -1)
      : std::runtime_error(what), location_(location), node_index_(node_index) {}

  double location() const noexcept { return location_; }
  std::ptrdiff_t node_index() const noexcept { return node_index_; }

 private:
  double location_;
  std::ptrdiff_t node_index_;
};

// A series or iteration did not reach its target accuracy; carries the best
// value obtained.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double partial_value)
      : std::runtime_error(what), partial_value_(partial_value) {}

  double partial_value() const noexcept { return partial_value_; }

 private:
  double partial_value_;
};

class ConservationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nelson
