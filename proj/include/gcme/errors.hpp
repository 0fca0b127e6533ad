#pragma once

#include <stdexcept>
#include <string>

namespace gcme {

// Base class for all structured failures raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : Error {
    using Error::Error;
};
struct TailNotConverged : Error {
    using Error::Error;
};
struct OverflowRisk : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct SameIndex : Error {
    using Error::Error;
};
struct PoleHit : Error {
    using Error::Error;
};
struct SpectralConditionViolated : Error {
    using Error::Error;
};
struct RootNotBracketed : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct DegenerateDenominator : Error {
    using Error::Error;
};
struct UnstableStep : Error {
    using Error::Error;
};
struct AllCoeffsZeroAfterShrink : Error {
    using Error::Error;
};
struct ShrinkTooSevere : Error {
    using Error::Error;
};
struct GridTooShort : Error {
    using Error::Error;
};
struct DegenerateFit : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace gcme
