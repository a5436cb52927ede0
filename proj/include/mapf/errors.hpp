#pragma once

#include <stdexcept>
#include <string>

namespace mapf {

// Malformed .map / .scen / solution text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates scenario invariants (blocked, duplicate, unreachable).
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A path step that is not a legal move.
class InvalidSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weights file magic/version/shape problems.
class WeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset file format problems.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mapf
