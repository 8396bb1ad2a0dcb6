#pragma once

#include <stdexcept>

namespace weaver {

/// Thrown when an operation would exceed a size/memory cap (full vectors and
/// enumerations grow as 2^n). Kept distinct from std::domain_error so callers
/// (notably the CLI) can map cap violations to their own exit status.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace weaver
