#pragma once

#include <stdexcept>
#include <string>

namespace iid {

/// Bad inputs from the outside world: missing/corrupt files, malformed
/// datasets, mismatched shapes between user-supplied images.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric breakdown (NaN/Inf) detected inside a computation.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller misuse of the command-line surface (unknown scene name, bad flag
/// combination). Maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace iid
