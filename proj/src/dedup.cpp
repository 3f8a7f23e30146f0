#include "dedup.hpp"

#include <string>
#include <unordered_map>

namespace ct {
namespace {

// FNV-1a, widened to 128 bits.
constexpr unsigned __int128 fnv128_basis =
    (static_cast<unsigned __int128>(0x6c62272e07bb0142ull) << 64) | 0x62b821756295c58dull;
constexpr unsigned __int128 fnv128_prime =
    (static_cast<unsigned __int128>(0x0000000001000000ull) << 64) | 0x000000000000013bull;

} // namespace

StackDigest digest_key_sequence(const std::vector<FrameKey>& keys) {
    std::string bytes;
    std::string scratch;
    for (const auto& key : keys) {
        scratch.clear();
        append_canonical_bytes(key, scratch);
        // Length prefix keeps adjacent keys from bleeding into one another
        // and makes the digest sensitive to sequence length.
        const std::uint64_t len = scratch.size();
        for (int shift = 0; shift < 64; shift += 8)
            bytes.push_back(static_cast<char>((len >> shift) & 0xff));
        bytes += scratch;
    }

    unsigned __int128 state = fnv128_basis;
    for (const unsigned char c : bytes) {
        state ^= c;
        state *= fnv128_prime;
    }
    return StackDigest{static_cast<std::uint64_t>(state >> 64),
                       static_cast<std::uint64_t>(state)};
}

StackDigest stack_digest(const CallStack& stack, const LibcPolicy& policy,
                         const SimilarityConfig& config) {
    return digest_key_sequence(prepared_keys(stack, policy, config));
}

DedupOutcome dedup_reports(const std::vector<CrashReport>& reports,
                           const LibcPolicy& policy, const SimilarityConfig& config) {
    DedupOutcome out;
    std::unordered_map<StackDigest, std::vector<std::size_t>, StackDigestHash> buckets;
    std::vector<std::vector<FrameKey>> kept_keys(reports.size());

    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::vector<FrameKey> keys = prepared_keys(reports[i].stack, policy, config);
        const StackDigest digest = digest_key_sequence(keys);

        std::size_t representative = reports.size();
        for (const std::size_t candidate : buckets[digest]) {
            if (kept_keys[candidate] == keys) {
                representative = candidate;
                break;
            }
        }
        if (representative != reports.size()) {
            out.duplicates.emplace_back(i, representative);
            continue;
        }
        buckets[digest].push_back(i);
        kept_keys[i] = std::move(keys);
        out.kept.push_back(i);
    }
    return out;
}

} // namespace ct
