#include "preprocess.hpp"

#include <filesystem>

namespace ct {
namespace {

void append_u64(std::uint64_t v, std::string& out) {
    for (int shift = 0; shift < 64; shift += 8)
        out.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::string path_basename(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

} // namespace

void append_canonical_bytes(const FrameKey& key, std::string& out) {
    if (const auto* mo = std::get_if<ModuleOffsetKey>(&key)) {
        out.push_back('M');
        out.append(mo->module);
        out.push_back('\0');
        append_u64(mo->offset, out);
    } else if (const auto* sl = std::get_if<SymbolLineKey>(&key)) {
        out.push_back('S');
        out.append(sl->function);
        out.push_back('\0');
        out.append(sl->file);
        out.push_back('\0');
        append_u64(sl->line, out);
    } else {
        out.push_back('A');
        append_u64(std::get<RawAddressKey>(key).address, out);
    }
}

std::uint64_t hash_key(const FrameKey& key) noexcept {
    // FNV-1a over the canonical encoding, without materializing it.
    constexpr std::uint64_t basis = 0xcbf29ce484222325ULL;
    constexpr std::uint64_t prime = 0x100000001b3ULL;
    std::uint64_t h = basis;
    auto mix_byte = [&](unsigned char b) {
        h ^= b;
        h *= prime;
    };
    auto mix_str = [&](const std::string& s) {
        for (unsigned char c : s)
            mix_byte(c);
        mix_byte(0);
    };
    auto mix_u64 = [&](std::uint64_t v) {
        for (int shift = 0; shift < 64; shift += 8)
            mix_byte(static_cast<unsigned char>((v >> shift) & 0xff));
    };
    if (const auto* mo = std::get_if<ModuleOffsetKey>(&key)) {
        mix_byte('M');
        mix_str(mo->module);
        mix_u64(mo->offset);
    } else if (const auto* sl = std::get_if<SymbolLineKey>(&key)) {
        mix_byte('S');
        mix_str(sl->function);
        mix_str(sl->file);
        mix_u64(sl->line);
    } else {
        mix_byte('A');
        mix_u64(std::get<RawAddressKey>(key).address);
    }
    return h;
}

FrameKey frame_key(const Frame& frame) {
    if (frame.module_path && frame.module_offset)
        return ModuleOffsetKey{path_basename(*frame.module_path), *frame.module_offset};
    if (frame.function_name) {
        SymbolLineKey key;
        key.function = *frame.function_name;
        if (frame.source_file) {
            key.file = *frame.source_file;
            key.line = frame.source_line.value_or(0);
        }
        return key;
    }
    // Frame invariants guarantee an address here.
    return RawAddressKey{frame.address.value()};
}

bool is_libc_frame(const Frame& frame, const LibcPolicy& policy) {
    if (frame.module_path && !policy.module_pattern.empty() &&
        path_basename(*frame.module_path).find(policy.module_pattern) != std::string::npos)
        return true;
    if (frame.function_name) {
        if (policy.trigger_functions.count(*frame.function_name))
            return true;
        if (frame.function_name->rfind("__GI_", 0) == 0)
            return true;
    }
    return false;
}

CallStack trim_abort_chain(const CallStack& stack, const LibcPolicy& policy) {
    const auto& frames = stack.frames();

    std::size_t prefix = 0;
    while (prefix < frames.size() && is_libc_frame(frames[prefix], policy))
        ++prefix;
    if (prefix == 0)
        return stack;

    const auto& top_function = frames[0].function_name;
    if (!top_function || !policy.trigger_functions.count(*top_function))
        return stack;

    // Keep the last frame of the chain (the libc entry point user code
    // called into) unless the policy says to drop it too. Never drop the
    // whole stack.
    std::size_t first_kept = prefix - 1;
    if (policy.drop_boundary_frame && prefix < frames.size())
        first_kept = prefix;

    std::vector<Frame> kept(frames.begin() + static_cast<std::ptrdiff_t>(first_kept),
                            frames.end());
    for (std::size_t i = 0; i < kept.size(); ++i)
        kept[i].index = i;
    return CallStack(std::move(kept));
}

std::vector<FrameKey> key_sequence(const CallStack& stack) {
    std::vector<FrameKey> keys;
    keys.reserve(stack.size());
    for (const auto& frame : stack.frames())
        keys.push_back(frame_key(frame));
    return keys;
}

std::vector<FrameKey> prepared_keys(const CallStack& stack, const LibcPolicy& policy,
                                    const SimilarityConfig& config) {
    if (!config.trim_enabled)
        return key_sequence(stack);
    return key_sequence(trim_abort_chain(stack, policy));
}

} // namespace ct
