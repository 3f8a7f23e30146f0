#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace ct {

/// One call site of a crash stack. Index 0 is the innermost (crash) frame.
/// A frame is only meaningful if it can be identified somehow: it must carry
/// an address, a module+offset pair, or a function name.
struct Frame {
    std::size_t index = 0;
    std::optional<std::uint64_t> address;
    std::optional<std::string> function_name;
    std::optional<std::string> module_path;
    std::optional<std::uint64_t> module_offset;
    std::optional<std::string> source_file;
    std::optional<std::uint32_t> source_line;

    bool operator==(const Frame&) const = default;
};

/// Throws Error(invalid_argument) when the frame breaks one of the field
/// dependency rules (offset without module, line without file, or no
/// identity at all).
void validate_frame(const Frame& frame);

/// Ordered, non-empty list of frames with indices running 0..n-1 from the
/// top of the stack. Immutable after construction.
class CallStack {
public:
    /// Throws Error(empty_stack) / Error(non_consecutive_indices) /
    /// Error(invalid_argument) when the frame list breaks an invariant.
    explicit CallStack(std::vector<Frame> frames);

    const std::vector<Frame>& frames() const noexcept { return frames_; }
    std::size_t size() const noexcept { return frames_.size(); }

    bool operator==(const CallStack&) const = default;

private:
    std::vector<Frame> frames_;
};

/// One /proc-style memory mapping of the crashed process.
struct Mapping {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t file_offset = 0;
    std::string path;

    bool operator==(const Mapping&) const = default;
};

void validate_mapping(const Mapping& mapping);

/// One parsed crash report: a stack, the mappings needed to rebase its
/// addresses, and where it came from on disk.
struct CrashReport {
    std::string id;
    CallStack stack;
    std::vector<Mapping> mappings;
    std::filesystem::path source_path;

    bool operator==(const CrashReport&) const = default;
};

/// Knobs of the stack-similarity metric and the flat dendrogram cut.
///   top_coef - weight decay per step away from the top of the stack
///   rel_coef - weight decay per step of misalignment between matched frames
///   threshold - distance at which clusters stop merging
struct SimilarityConfig {
    double top_coef = 0.04;
    double rel_coef = 0.13;
    double threshold = 0.3;
    bool trim_enabled = true;

    bool operator==(const SimilarityConfig&) const = default;
};

void validate_config(const SimilarityConfig& config);

} // namespace ct
