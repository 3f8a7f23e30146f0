#include "report.hpp"

#include <utility>

namespace ct {

const char* errc_name(errc code) noexcept {
    switch (code) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::empty_stack: return "empty_stack";
    case errc::non_consecutive_indices: return "non_consecutive_indices";
    case errc::no_frames_found: return "no_frames_found";
    case errc::malformed_frame: return "malformed_frame";
    case errc::schema_error: return "schema_error";
    case errc::dir_not_found: return "dir_not_found";
    case errc::no_valid_reports: return "no_valid_reports";
    case errc::io_error: return "io_error";
    case errc::output_conflict: return "output_conflict";
    }
    return "unknown";
}

void validate_frame(const Frame& frame) {
    if (frame.module_offset && !frame.module_path)
        raise(errc::invalid_argument, "frame has module_offset without module_path");
    if (frame.source_line && !frame.source_file)
        raise(errc::invalid_argument, "frame has source_line without source_file");
    const bool has_module_pair = frame.module_path && frame.module_offset;
    if (!frame.address && !has_module_pair && !frame.function_name)
        raise(errc::invalid_argument,
              "frame carries no identity (address, module+offset or function name)");
}

CallStack::CallStack(std::vector<Frame> frames) : frames_(std::move(frames)) {
    if (frames_.empty())
        raise(errc::empty_stack, "call stack has no frames");
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        if (frames_[i].index != i)
            raise(errc::non_consecutive_indices,
                  "frame indices must run 0..n-1 from the top, got " +
                      std::to_string(frames_[i].index) + " at position " + std::to_string(i));
        validate_frame(frames_[i]);
    }
}

void validate_mapping(const Mapping& mapping) {
    if (mapping.start >= mapping.end)
        raise(errc::invalid_argument, "mapping start must be below end: " + mapping.path);
}

void validate_config(const SimilarityConfig& config) {
    if (!(config.top_coef >= 0.0))
        raise(errc::invalid_argument, "top coefficient must be >= 0");
    if (!(config.rel_coef >= 0.0))
        raise(errc::invalid_argument, "rel coefficient must be >= 0");
    if (!(config.threshold >= 0.0 && config.threshold <= 1.0))
        raise(errc::invalid_argument, "threshold must lie in [0, 1]");
}

} // namespace ct
