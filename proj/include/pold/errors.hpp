#pragma once

#include <stdexcept>
#include <string>

namespace pold {

// Base for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Poset construction: the cover relation admits a directed cycle.
struct CycleDetected : Error {
    using Error::Error;
};

// Poset construction: a listed cover edge is implied transitively by others.
struct NonImmediateCover : Error {
    using Error::Error;
};

// An element index is out of range or otherwise invalid for its poset.
struct InvalidElement : Error {
    using Error::Error;
};

// Two elements of one poset carry the same label.
struct DuplicateLabel : Error {
    using Error::Error;
};

// q2(x, y) requires y to be an upper cover of x.
struct NotACover : Error {
    using Error::Error;
};

// Tuple arity does not match the number of factors.
struct DimensionMismatch : Error {
    using Error::Error;
};

// The product is too large for an exhaustive scan.
struct SpaceTooLarge : Error {
    using Error::Error;
};

// A factor that must be filled with its greatest element has none.
struct NoGreatestElement : Error {
    using Error::Error;
};

// Feature duplication requires classes with pairwise distinct descriptions.
struct OverlappingClasses : Error {
    using Error::Error;
};

// A model is applied to an object from a different space.
struct SpaceMismatch : Error {
    using Error::Error;
};

// Malformed input document; carries file and line context when known.
struct ParseError : Error {
    using Error::Error;
    ParseError(const std::string& file, int line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what) {}
};

// A data row uses a value label absent from the order specification.
struct UnknownValue : ParseError {
    using ParseError::ParseError;
};

// The synthetic top label is reserved and may not appear in user data.
struct ReservedLabelCollision : Error {
    using Error::Error;
};

// Cross-validation needs at least `folds` objects in every class.
struct TooFewObjectsPerClass : Error {
    using Error::Error;
};

}  // namespace pold
