#pragma once

#include <stdexcept>
#include <string>

namespace spiked {

// Every library failure derives from Error so callers can map it to an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SPIKED_DEFINE_ERROR(Name)                       \
    class Name : public Error {                         \
    public:                                             \
        explicit Name(const std::string& what_arg)      \
            : Error(std::string(#Name ": ") + what_arg) \
        {                                               \
        }                                               \
    };

SPIKED_DEFINE_ERROR(NoConvergence)
SPIKED_DEFINE_ERROR(QuadratureFailure)
SPIKED_DEFINE_ERROR(DomainError)
SPIKED_DEFINE_ERROR(UnsupportedModel)
SPIKED_DEFINE_ERROR(ThetaZeroSingularity)
SPIKED_DEFINE_ERROR(NegativeDensity)
SPIKED_DEFINE_ERROR(EigensolverFailure)
SPIKED_DEFINE_ERROR(InvalidCount)
SPIKED_DEFINE_ERROR(EmptySample)
SPIKED_DEFINE_ERROR(UnknownFigure)

#undef SPIKED_DEFINE_ERROR

}  // namespace spiked
