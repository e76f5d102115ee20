#pragma once

#include <stdexcept>
#include <string>

namespace tomoforge {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map families of failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the supported numeric range (e.g. Fock index too large).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Quantity undefined for the given argument (e.g. gain at alpha = 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent arguments (mismatched grids, bad fractions...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Fock truncation too small to hold the requested state.
class CutoffError : public Error {
 public:
  using Error::Error;
};

// A scale or integral that must be positive is zero.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Image pixel that no colormap entry explains.
class ForeignPixelError : public Error {
 public:
  using Error::Error;
};

// Caller broke a precondition of the API (unnormalized pdf, backward without
// forward, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// I/O and parse failures on the external file formats.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Training produced non-finite losses.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long epoch) : Error(what), epoch_(epoch) {}
  long epoch() const noexcept { return epoch_; }

 private:
  long epoch_;
};

}  // namespace tomoforge
