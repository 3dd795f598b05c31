#ifndef CDI_ERRORS_HPP
#define CDI_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace cdi {

// Base class for all library errors. Subclasses carry the failure kind in
// the type so callers can react per condition.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CDI_DEFINE_ERROR(Name)                                \
  class Name : public Error {                                 \
  public:                                                     \
    explicit Name(const std::string& msg) : Error(msg) {}     \
  }

CDI_DEFINE_ERROR(InvalidMatrix);
CDI_DEFINE_ERROR(NotPositiveDefinite);
CDI_DEFINE_ERROR(DimensionError);
CDI_DEFINE_ERROR(SingularMap);
CDI_DEFINE_ERROR(EmptySelection);
CDI_DEFINE_ERROR(InvalidFraction);
CDI_DEFINE_ERROR(InvalidField);
CDI_DEFINE_ERROR(OutOfDomain);
CDI_DEFINE_ERROR(GridTooCoarse);
CDI_DEFINE_ERROR(ZeroReference);
CDI_DEFINE_ERROR(FormatError);
CDI_DEFINE_ERROR(InvalidTime);
CDI_DEFINE_ERROR(InvalidExponent);
CDI_DEFINE_ERROR(CharacteristicsCrossed);
CDI_DEFINE_ERROR(VacuumError);
CDI_DEFINE_ERROR(NoConvergence);
CDI_DEFINE_ERROR(DetachedShock);
CDI_DEFINE_ERROR(MapSingular);
CDI_DEFINE_ERROR(InvalidPatch);
CDI_DEFINE_ERROR(InversionFailed);
CDI_DEFINE_ERROR(OutOfPatch);
CDI_DEFINE_ERROR(InvalidParameter);

#undef CDI_DEFINE_ERROR

// Non-monotone projected parameters in rescaling learning; carries the
// offending snapshot indices.
class NonMonotoneRescaling : public Error {
public:
  NonMonotoneRescaling(const std::string& msg, std::vector<std::size_t> indices)
      : Error(msg), offending(std::move(indices)) {}
  std::vector<std::size_t> offending;
};

}  // namespace cdi

#endif
