#pragma once

#include <stdexcept>
#include <string>

namespace ct {

enum class errc {
    invalid_argument,
    empty_stack,
    non_consecutive_indices,
    no_frames_found,
    malformed_frame,
    schema_error,
    dir_not_found,
    no_valid_reports,
    io_error,
    output_conflict,
};

const char* errc_name(errc code) noexcept;

/// Error thrown by every fallible operation in the library. Carries a
/// machine-checkable code next to the human-readable message so the C API
/// can map failures onto status codes without string matching.
class Error : public std::runtime_error {
public:
    Error(errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, std::string message) {
    throw Error(code, std::move(message));
}

} // namespace ct
