#pragma once

#include <stdexcept>
#include <string>

namespace modsym {

/// Base for every error raised by the library. CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotHyperbolic : public Error { using Error::Error; };
class OverflowError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class ContextMismatch : public Error { using Error::Error; };
class BoundViolation : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class MissingSymbols : public Error { using Error::Error; };
class NoSuitablePair : public Error { using Error::Error; };
class DegenerateLattice : public Error { using Error::Error; };
class IncompleteEnumeration : public Error { using Error::Error; };
class EmptyDistribution : public Error { using Error::Error; };
class CoverageMismatch : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

class InsufficientCoefficients : public Error {
 public:
  InsufficientCoefficients(long long required, long long available)
      : Error("insufficient q-expansion coefficients: need M=" + std::to_string(required) +
              ", have M=" + std::to_string(available)),
        required_(required) {}
  long long required() const noexcept { return required_; }

 private:
  long long required_;
};

}  // namespace modsym
