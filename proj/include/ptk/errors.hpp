#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define PTK_DEFINE_ERROR(Name)                      \
    struct Name : Error {                           \
        using Error::Error;                         \
    }

PTK_DEFINE_ERROR(LengthMismatch);
PTK_DEFINE_ERROR(BadWindow);
PTK_DEFINE_ERROR(NotPowerOfTwo);
PTK_DEFINE_ERROR(TooManyLevels);
PTK_DEFINE_ERROR(ShapeMismatch);
PTK_DEFINE_ERROR(EmptyScales);
PTK_DEFINE_ERROR(TooSmall);
PTK_DEFINE_ERROR(ZeroVariance);
PTK_DEFINE_ERROR(ZeroEnergy);
PTK_DEFINE_ERROR(TooShort);
PTK_DEFINE_ERROR(LabelOutOfRange);
PTK_DEFINE_ERROR(SingleClass);
PTK_DEFINE_ERROR(EmptyInput);
PTK_DEFINE_ERROR(LifeTooShort);
PTK_DEFINE_ERROR(DegenerateData);
PTK_DEFINE_ERROR(NegativeRul);
PTK_DEFINE_ERROR(DivergenceDetected);
PTK_DEFINE_ERROR(BadMagic);
PTK_DEFINE_ERROR(TruncatedFile);
PTK_DEFINE_ERROR(UsageError);

#undef PTK_DEFINE_ERROR

struct MalformedRow : Error {
    std::size_t line_no;
    MalformedRow(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_no(line) {}
};

struct NonConsecutiveCycles : Error {
    int unit_id;
    explicit NonConsecutiveCycles(int unit, const std::string& what)
        : Error("unit " + std::to_string(unit) + ": " + what), unit_id(unit) {}
};

} // namespace ptk
