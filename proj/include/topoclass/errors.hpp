#pragma once

#include <stdexcept>
#include <string>

namespace topoclass {

// Root of every error thrown by the library. Callers that only care about
// "something in topoclass failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define TOPOCLASS_DEFINE_ERROR(Name)                 \
    class Name : public Error {                      \
    public:                                          \
        using Error::Error;                          \
    }

TOPOCLASS_DEFINE_ERROR(DimensionError);
TOPOCLASS_DEFINE_ERROR(ShapeError);
TOPOCLASS_DEFINE_ERROR(ConvergenceError);
TOPOCLASS_DEFINE_ERROR(SpecError);
TOPOCLASS_DEFINE_ERROR(SchemaError);
TOPOCLASS_DEFINE_ERROR(IndexError);
TOPOCLASS_DEFINE_ERROR(ConfigError);
TOPOCLASS_DEFINE_ERROR(DomainError);
TOPOCLASS_DEFINE_ERROR(EmptyInputError);
TOPOCLASS_DEFINE_ERROR(SeparationError);
TOPOCLASS_DEFINE_ERROR(NumericalError);
// A theorem or construction whose hypothesis does not hold for the input
// (e.g. asking for a kernel witness of a layer with rows >= cols).
TOPOCLASS_DEFINE_ERROR(NotApplicableError);

#undef TOPOCLASS_DEFINE_ERROR

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace topoclass
