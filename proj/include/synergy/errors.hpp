#pragma once

#include <stdexcept>
#include <string>

namespace synergy {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SYNERGY_DEFINE_ERROR(Name)          \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

SYNERGY_DEFINE_ERROR(NonSkewInput);
SYNERGY_DEFINE_ERROR(NonUnitAxis);
SYNERGY_DEFINE_ERROR(NotOrthonormal);
SYNERGY_DEFINE_ERROR(InvalidWarpGain);
SYNERGY_DEFINE_ERROR(InvalidConfig);
SYNERGY_DEFINE_ERROR(SingularConfiguration);
SYNERGY_DEFINE_ERROR(ZenoSuspected);
SYNERGY_DEFINE_ERROR(StateInvariantViolation);
SYNERGY_DEFINE_ERROR(SingularInertia);
SYNERGY_DEFINE_ERROR(DegenerateWindow);
SYNERGY_DEFINE_ERROR(BisectionFailure);
SYNERGY_DEFINE_ERROR(ConfigError);
SYNERGY_DEFINE_ERROR(UnknownParameter);

#undef SYNERGY_DEFINE_ERROR

}  // namespace synergy
