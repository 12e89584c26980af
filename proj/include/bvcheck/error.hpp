#pragma once

#include <stdexcept>
#include <string>

namespace bvcheck {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, corpus or plan input (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a mathematical operation was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ZeroConstantTerm : public DomainError {
 public:
  ZeroConstantTerm() : DomainError("series has zero constant term and cannot be inverted") {}
};

class NonzeroConstantTerm : public DomainError {
 public:
  NonzeroConstantTerm() : DomainError("exponential needs a series with zero constant term") {}
};

/// The series would not terminate under the current caps.
class UnboundedTruncation : public DomainError {
 public:
  using DomainError::DomainError;
};

class MixedGrade : public DomainError {
 public:
  MixedGrade() : DomainError("polynomial is not ghost-number homogeneous") {}
};

class NotRetardedInvertible : public DomainError {
 public:
  NotRetardedInvertible(int site, int component)
      : DomainError("quadratic operator is not retarded-invertible; first blocking site " +
                    std::to_string(site) + " component " + std::to_string(component)),
        site_(site),
        component_(component) {}
  int site() const { return site_; }
  int component() const { return component_; }

 private:
  int site_;
  int component_;
};

class BadH : public DomainError {
 public:
  using DomainError::DomainError;
};

class BoundarySite : public DomainError {
 public:
  explicit BoundarySite(int site) : DomainError("site " + std::to_string(site) + " is not interior") {}
};

class BoundarySupport : public DomainError {
 public:
  BoundarySupport() : DomainError("functional is not supported on interior sites") {}
};

class CutoffDoesNotFit : public DomainError {
 public:
  CutoffDoesNotFit() : DomainError("no admissible cutoff fits inside the lattice for this configuration") {}
};

class BadGhostNumber : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonQuadraticAction : public DomainError {
 public:
  NonQuadraticAction() : DomainError("homology requires a quadratic extended action") {}
};

class ConsistencyUnverified : public DomainError {
 public:
  ConsistencyUnverified() : DomainError("propagator consistency conditions do not hold") {}
};

class SupportsNotOrdered : public DomainError {
 public:
  SupportsNotOrdered() : DomainError("supports are not causally ordered (F1 must precede F2)") {}
};

class UnknownCheck : public Error {
 public:
  explicit UnknownCheck(const std::string& name) : Error("unknown check '" + name + "'") {}
};

}  // namespace bvcheck
