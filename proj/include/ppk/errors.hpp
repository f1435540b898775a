#pragma once

#include <stdexcept>
#include <string>

namespace ppk {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define PPK_ERROR_KIND(Name)          \
  class Name : public Error {         \
  public:                             \
    using Error::Error;               \
  };

PPK_ERROR_KIND(RangeError)
PPK_ERROR_KIND(ConvergenceError)
PPK_ERROR_KIND(GeometryError)
PPK_ERROR_KIND(PrecisionError)
PPK_ERROR_KIND(ProbeError)
PPK_ERROR_KIND(CapabilityError)
PPK_ERROR_KIND(PreconditionError)
PPK_ERROR_KIND(DomainError)
PPK_ERROR_KIND(UsageError)
PPK_ERROR_KIND(FormatError)

#undef PPK_ERROR_KIND

} // namespace ppk
