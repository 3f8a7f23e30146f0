#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "report.hpp"

namespace ct {

// ASLR-stable frame identities, strongest first. Absolute addresses are the
// last resort because they change between runs of the same binary.

struct ModuleOffsetKey {
    std::string module; // basename of the mapped object, not the full path
    std::uint64_t offset = 0;

    bool operator==(const ModuleOffsetKey&) const = default;
};

struct SymbolLineKey {
    std::string function;
    std::string file;        // empty when no source location is known
    std::uint32_t line = 0;  // 0 when no line is known

    bool operator==(const SymbolLineKey&) const = default;
};

struct RawAddressKey {
    std::uint64_t address = 0;

    bool operator==(const RawAddressKey&) const = default;
};

using FrameKey = std::variant<ModuleOffsetKey, SymbolLineKey, RawAddressKey>;

/// Appends a tagged, self-delimiting byte encoding of the key. Equal keys
/// produce equal bytes and distinct keys distinct bytes, so the encoding can
/// back both hashing and digesting.
void append_canonical_bytes(const FrameKey& key, std::string& out);

std::uint64_t hash_key(const FrameKey& key) noexcept;

struct FrameKeyHash {
    std::size_t operator()(const FrameKey& key) const noexcept {
        return static_cast<std::size_t>(hash_key(key));
    }
};

/// Maps a frame to its strongest available identity:
/// module+offset, then symbol+source, then bare symbol, then raw address.
FrameKey frame_key(const Frame& frame);

/// Which frames count as libc, and which function names mark the top of an
/// abort chain worth trimming. Both are configurable because distro paths
/// and symbol names vary.
struct LibcPolicy {
    std::string module_pattern = "libc";
    std::unordered_set<std::string> trigger_functions = {
        "__GI_raise", "raise",      "gsignal",          "abort",          "__GI_abort",
        "__assert_fail", "__libc_message", "__stack_chk_fail", "__fortify_fail",
    };
    // When set, the last libc frame of the chain is dropped together with the
    // rest instead of being kept as the boundary frame.
    bool drop_boundary_frame = false;
};

bool is_libc_frame(const Frame& frame, const LibcPolicy& policy);

/// Removes the libc abort chain from the top of a stack: when the topmost
/// frame is a known raise/abort-family function, the run of libc frames is
/// dropped up to (and normally excluding) its last frame. Never empties the
/// stack; frame indices are renumbered from 0.
CallStack trim_abort_chain(const CallStack& stack, const LibcPolicy& policy);

/// Keys of every frame, top to bottom, on the untouched stack.
std::vector<FrameKey> key_sequence(const CallStack& stack);

/// Keys used for comparison and hashing: abort-chain trimming is applied
/// first iff config.trim_enabled.
std::vector<FrameKey> prepared_keys(const CallStack& stack, const LibcPolicy& policy,
                                    const SimilarityConfig& config);

} // namespace ct
