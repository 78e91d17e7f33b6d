#ifndef LSCD_ERROR_H_
#define LSCD_ERROR_H_

#include <stdexcept>
#include <string>

namespace lscd {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorClass {
  kValidation,  // bad parameters or configuration
  kInput,       // unreadable or malformed files
  kNumerical,   // degenerate or undefined quantities
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass error_class, const std::string &message)
      : std::runtime_error(message), error_class_(error_class) {}

  ErrorClass error_class() const { return error_class_; }

 private:
  ErrorClass error_class_;
};

// Malformed line or value in an input file.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string &message)
      : Error(ErrorClass::kInput, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &message)
      : Error(ErrorClass::kInput, message) {}
};

// Argument outside of its documented domain.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string &message)
      : Error(ErrorClass::kValidation, message) {}
};

// Pipeline configuration that fails compatibility checks.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &message)
      : Error(ErrorClass::kValidation, message) {}
};

// Zero vectors, empty distributions, zero-variance correlations.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string &message)
      : Error(ErrorClass::kNumerical, message) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string &message)
      : Error(ErrorClass::kNumerical, message) {}
};

class MissingWordError : public Error {
 public:
  explicit MissingWordError(const std::string &message)
      : Error(ErrorClass::kNumerical, message) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string &message)
      : Error(ErrorClass::kNumerical, message) {}
};

}  // namespace lscd

#endif  // LSCD_ERROR_H_
