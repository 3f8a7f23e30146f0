#pragma once

#include <cstdint>
#include <vector>

#include "preprocess.hpp"
#include "report.hpp"

namespace ct {

// 128-bit digest of an ordered frame-key sequence. Wide enough that
// collisions are a non-issue at any realistic corpus size, but equality
// of digests is still confirmed against the actual sequences before a
// report is declared a duplicate.
struct StackDigest {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend bool operator==(const StackDigest&, const StackDigest&) = default;
};

struct StackDigestHash {
    std::size_t operator()(const StackDigest& d) const noexcept {
        return d.hi ^ (d.lo * 0x9e3779b97f4a7c15ull);
    }
};

StackDigest digest_key_sequence(const std::vector<FrameKey>& keys);

// Digest of the stack after key extraction and (if enabled) abort-chain
// trimming, so two reports count as duplicates exactly when the metric
// would see identical inputs.
StackDigest stack_digest(const CallStack& stack, const LibcPolicy& policy,
                         const SimilarityConfig& config);

struct DedupOutcome {
    // Indices into the input batch, in input order.
    std::vector<std::size_t> kept;
    // (duplicate index, index of its kept representative).
    std::vector<std::pair<std::size_t, std::size_t>> duplicates;
};

// First occurrence wins; the batch is expected to be in lexicographic
// filename order already (load_report_dir guarantees it).
DedupOutcome dedup_reports(const std::vector<CrashReport>& reports,
                           const LibcPolicy& policy, const SimilarityConfig& config);

} // namespace ct
