#pragma once

#include <stdexcept>
#include <string>

namespace qf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define QF_DEFINE_ERROR(Name)                   \
    struct Name : Error {                       \
        using Error::Error;                     \
    }

QF_DEFINE_ERROR(NonHermitianSpectrum);
QF_DEFINE_ERROR(InvalidOrder);
QF_DEFINE_ERROR(GridMismatch);
QF_DEFINE_ERROR(NotDiffeomorphism);
QF_DEFINE_ERROR(ShockSuspected);
QF_DEFINE_ERROR(StepUnstable);
QF_DEFINE_ERROR(EllipticityViolated);
QF_DEFINE_ERROR(TimeOutOfRange);
QF_DEFINE_ERROR(FlowDegenerate);
QF_DEFINE_ERROR(ZeroField);
QF_DEFINE_ERROR(UnderResolved);
QF_DEFINE_ERROR(ZeroFrequency);
QF_DEFINE_ERROR(TaylorSignViolation);
QF_DEFINE_ERROR(IoError);
QF_DEFINE_ERROR(UsageError);
QF_DEFINE_ERROR(ConfigError);

#undef QF_DEFINE_ERROR

}  // namespace qf
