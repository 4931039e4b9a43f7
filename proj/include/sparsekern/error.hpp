#pragma once

#include <stdexcept>
#include <string>

namespace sparsekern {

/// Bad arguments, malformed specs, shape mismatches. The CLI maps these to exit code 2.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the domain of a kernel (e.g. a zero vector for the arc-cosine kernel).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure at run time (singular systems, non-convergence).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw validation_error(what);
}

}  // namespace sparsekern
