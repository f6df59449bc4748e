#ifndef MSR_ERRORS_HPP
#define MSR_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msr {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameters (n/k/d out of range, unsupported field, ...).
class param_error : public error {
public:
    using error::error;
};

/// Operation outside an argument's domain (e.g. inverse of zero).
class domain_error : public error {
public:
    using error::error;
};

/// Requested reconstruction is information-theoretically impossible
/// (too many erasures, too few shards, too few helpers).
class unrecoverable_error : public error {
public:
    using error::error;
};

/// A linear system that should have a unique solution does not.
class singular_error : public error {
public:
    singular_error(const std::string& msg, std::size_t pivot_col)
        : error(msg), pivot_col(pivot_col) {}
    std::size_t pivot_col;
};

/// Broken internal invariant; indicates a construction bug, not user error.
class internal_error : public error {
public:
    using error::error;
};

/// File or stream problem in the shard tooling.
class io_error : public error {
public:
    using error::error;
};

} // namespace msr

#endif
