#pragma once

#include <stdexcept>
#include <string>

namespace mdlsel {

// Error buckets map to CLI exit codes: spec = 2, data = 3, numeric = 4.
enum class ErrorClass { spec, data, numeric };

class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, const std::string& msg) : std::runtime_error(msg), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

private:
  ErrorClass cls_;
};

#define MDLSEL_ERROR_TYPE(Name, Cls)                                          \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& msg)                                     \
        : Error(ErrorClass::Cls, std::string(#Name) + ": " + msg) {}          \
  };

MDLSEL_ERROR_TYPE(SpecError, spec)

MDLSEL_ERROR_TYPE(ParseError, data)
MDLSEL_ERROR_TYPE(DimensionMismatch, data)
MDLSEL_ERROR_TYPE(UnknownFeature, data)
MDLSEL_ERROR_TYPE(ShapeMismatch, data)
MDLSEL_ERROR_TYPE(VersionMismatch, data)
MDLSEL_ERROR_TYPE(ChecksumMismatch, data)
MDLSEL_ERROR_TYPE(NoClassMap, data)
MDLSEL_ERROR_TYPE(FoldTooSmall, data)

MDLSEL_ERROR_TYPE(DomainError, numeric)
MDLSEL_ERROR_TYPE(DegenerateResidual, numeric)
MDLSEL_ERROR_TYPE(SingularDesign, numeric)

#undef MDLSEL_ERROR_TYPE

}  // namespace mdlsel
