#pragma once

#include <stdexcept>
#include <string>

namespace locc {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LOCC_DEFINE_ERROR(Name)                 \
    class Name : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

// numerics
LOCC_DEFINE_ERROR(NotSquare);
LOCC_DEFINE_ERROR(NotHermitian);
LOCC_DEFINE_ERROR(NotPsd);
LOCC_DEFINE_ERROR(NotProjector);
LOCC_DEFINE_ERROR(NotFinite);

// shared
LOCC_DEFINE_ERROR(DimensionMismatch);
LOCC_DEFINE_ERROR(EmptySet);

// states
LOCC_DEFINE_ERROR(NotNormalized);
LOCC_DEFINE_ERROR(NotUnitary);
LOCC_DEFINE_ERROR(NotUnitSum);

// similarity
LOCC_DEFINE_ERROR(RankTooSmall);

// transform
LOCC_DEFINE_ERROR(NotContractive);
LOCC_DEFINE_ERROR(ZeroProbability);
LOCC_DEFINE_ERROR(IncompleteProtocol);
LOCC_DEFINE_ERROR(RankDeficientReference);
LOCC_DEFINE_ERROR(InvalidCertificate);
LOCC_DEFINE_ERROR(BadTargetSupport);
LOCC_DEFINE_ERROR(NotFullRank);
LOCC_DEFINE_ERROR(RankDeficientOutcome);
LOCC_DEFINE_ERROR(UnsupportedOperator);
LOCC_DEFINE_ERROR(NotKEquivalent);

// applications
LOCC_DEFINE_ERROR(NotEntangled);

// cli / document handling
LOCC_DEFINE_ERROR(ParseError);

#undef LOCC_DEFINE_ERROR

} // namespace locc
