#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "preprocess.hpp"
#include "report.hpp"

namespace ct {

/// Distance of the matched pair from the top of the stacks: min(i, j).
inline std::size_t top_dist(std::size_t i, std::size_t j) noexcept {
    return i < j ? i : j;
}

/// Misalignment of a matched pair across the two stacks: |i - j|.
inline std::size_t rel_dist(std::size_t i, std::size_t j) noexcept {
    return i < j ? j - i : i - j;
}

/// Weight a matched frame pair contributes to the alignment score:
/// exp(-rel_coef*|i-j| - top_coef*min(i,j)). Symmetric in (i, j) and equal
/// to 1 when two crash sites match at the very top.
double match_weight(std::size_t i, std::size_t j, const SimilarityConfig& config);

/// The per-cell gain of the alignment recurrence: match_weight for matched
/// frames, 0 otherwise.
double addition(std::size_t i, std::size_t j, bool matched, const SimilarityConfig& config);

/// Largest achievable raw score: a perfect top-aligned diagonal match of the
/// shorter stack. Dividing by it maps identical stacks to exactly 1.
double normalizer(std::size_t shorter_len, const SimilarityConfig& config);

/// (n+1) x (m+1) score matrix of the alignment recurrence. Reusable across
/// calls so the pairwise loop does not allocate per pair.
class DpWorkspace {
public:
    void resize(std::size_t rows, std::size_t cols) {
        rows_ = rows;
        cols_ = cols;
        if (cells_.size() < rows * cols)
            cells_.resize(rows * cols);
    }

    double* row(std::size_t i) noexcept { return cells_.data() + i * cols_; }
    double at(std::size_t i, std::size_t j) const noexcept { return cells_[i * cols_ + j]; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> cells_;
};

/// Raw best-alignment score M[n][m] over interned frame symbols: the maximum
/// summed match_weight over all order-preserving matchings of equal symbols.
/// Fills the whole workspace matrix.
double weighted_lcs_score(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                          const SimilarityConfig& config, DpWorkspace& workspace);

/// Assigns dense int ids to frame keys; equal keys get equal ids. Insertion
/// order fixes the ids, so interning a batch in report order is
/// deterministic.
class KeyInterner {
public:
    std::int32_t id_for(const FrameKey& key);
    std::vector<std::int32_t> intern(const std::vector<FrameKey>& keys);
    std::size_t size() const noexcept { return ids_.size(); }

private:
    std::unordered_map<FrameKey, std::int32_t, FrameKeyHash> ids_;
};

/// Metric over already-extracted key sequences (trimmed or not, as the
/// caller decided): 1 for identical sequences, 0 for sequences sharing no
/// key.
double similarity_keys(const std::vector<FrameKey>& a, const std::vector<FrameKey>& b,
                       const SimilarityConfig& config);

/// Similarity of two already-preprocessed stacks in [0, 1]: 1 for identical
/// stacks, 0 for stacks sharing no frame key. Trimming, when wanted, is the
/// caller's job.
double similarity(const CallStack& a, const CallStack& b, const SimilarityConfig& config);

/// 1 - similarity.
double distance(const CallStack& a, const CallStack& b, const SimilarityConfig& config);

} // namespace ct
