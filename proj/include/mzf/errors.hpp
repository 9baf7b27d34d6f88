#pragma once

#include <stdexcept>
#include <string>

namespace mzf {

// Argument lies outside the convergence domain required by an evaluator.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested work exceeds a configured enumeration / size cap.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decomposition produced a divergent MZV index. Carries the offending
// ordered set partition in printable form.
class NonAdmissibleError : public std::runtime_error {
 public:
  NonAdmissibleError(const std::string& what, std::string partition)
      : std::runtime_error(what), partition_(std::move(partition)) {}
  const std::string& partition() const { return partition_; }

 private:
  std::string partition_;
};

// Broken internal invariant; reaching this is a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mzf
