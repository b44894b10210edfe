#pragma once

#include <stdexcept>
#include <string>

namespace specrec {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SPECREC_ERROR(Name)                                                    \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

SPECREC_ERROR(PoleHit);
SPECREC_ERROR(DegenerateSatake);
SPECREC_ERROR(RangeUnsupported);
SPECREC_ERROR(PreconditionViolated);
SPECREC_ERROR(OutsideStrip);
SPECREC_ERROR(DecayInsufficient);
SPECREC_ERROR(ConditionViolated);
SPECREC_ERROR(ParityViolation);
SPECREC_ERROR(OutsideConvergence);
SPECREC_ERROR(OutsideDisk);
SPECREC_ERROR(DivisibilityViolated);
SPECREC_ERROR(TailNotCertified);
SPECREC_ERROR(ConfigInvalid);
SPECREC_ERROR(IoError);

#undef SPECREC_ERROR

// Gamma poles are reported under the more general name.
using PoleAtNonpositiveInteger = PoleHit;
using PoleAtOne = PoleHit;

}  // namespace specrec
