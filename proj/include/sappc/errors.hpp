#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sappc {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularJacobian : public Error {
 public:
  explicit SingularJacobian(double q0)
      : Error("attitude Jacobian is singular (q_e0 = " + std::to_string(q0) + ")"), q0_(q0) {}
  double scalar_part() const { return q0_; }

 private:
  double q0_;
};

class NoJunctionRoot : public Error {
 public:
  using Error::Error;
};

class BranchViolation : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& what, int axis) : Error(what), axis_(axis) {}
  int axis() const { return axis_; }

 private:
  int axis_;
};

class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, std::ptrdiff_t last_valid_row)
      : Error(what), last_valid_row_(last_valid_row) {}
  std::ptrdiff_t last_valid_row() const { return last_valid_row_; }

 private:
  std::ptrdiff_t last_valid_row_;
};

class IncompleteLog : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, unsigned long line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  unsigned long line() const { return line_; }

 private:
  unsigned long line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string key, std::string rule)
      : Error(key + ": " + rule), key_(std::move(key)), rule_(std::move(rule)) {}
  const std::string& key() const { return key_; }
  const std::string& rule() const { return rule_; }

 private:
  std::string key_;
  std::string rule_;
};

}  // namespace sappc
