#pragma once

#include <stdexcept>
#include <string>

namespace omnigraph {

// Base for every domain error raised by the library. The CLI maps these to a
// one-line diagnostic and a nonzero exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define OMNIGRAPH_ERROR(Name)                 \
    class Name : public Error {               \
    public:                                   \
        using Error::Error;                   \
    }

OMNIGRAPH_ERROR(DomainError);
OMNIGRAPH_ERROR(HemisphereError);
OMNIGRAPH_ERROR(FormatError);
OMNIGRAPH_ERROR(IoError);
OMNIGRAPH_ERROR(InsufficientData);
OMNIGRAPH_ERROR(DegenerateEdge);
OMNIGRAPH_ERROR(DimensionMismatch);
OMNIGRAPH_ERROR(SizeLimit);
OMNIGRAPH_ERROR(DegenerateGeometry);
OMNIGRAPH_ERROR(ShapeError);
OMNIGRAPH_ERROR(DivergenceError);
OMNIGRAPH_ERROR(IndexError);
OMNIGRAPH_ERROR(UsageError);

#undef OMNIGRAPH_ERROR

}  // namespace omnigraph
