#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "preprocess.hpp"
#include "report.hpp"

namespace ct {

// Upper triangle of a symmetric distance matrix, flattened. Pair (i, j)
// with i < j lives at n*i - i*(i+1)/2 + (j - i - 1).
class CondensedDistanceMatrix {
public:
    explicit CondensedDistanceMatrix(std::size_t n)
        : n_(n), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    std::size_t pair_index(std::size_t i, std::size_t j) const {
        if (i > j)
            std::swap(i, j);
        return n_ * i - i * (i + 1) / 2 + (j - i - 1);
    }

    double at(std::size_t i, std::size_t j) const { return values_[pair_index(i, j)]; }
    void set(std::size_t i, std::size_t j, double v) { values_[pair_index(i, j)] = v; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

struct MergeStep {
    std::size_t left = 0;   // cluster id, always < right
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;   // members after the merge
};

struct ClusterAssignment {
    std::vector<std::size_t> labels; // 1..count, per observation
    std::size_t count = 0;
};

// Distances between every pair of prepared key sequences, computed on a
// small worker pool. The result does not depend on scheduling: each pair
// writes one fixed slot.
CondensedDistanceMatrix pairwise_distances(const std::vector<std::vector<FrameKey>>& keys,
                                           const SimilarityConfig& config, unsigned jobs);

// Complete-linkage agglomeration. At every step the pair of live clusters
// with minimal linkage distance merges; ties go to the smallest (left,
// right) id pair. Cluster ids: 0..n-1 are observations, n+s is the result
// of step s.
std::vector<MergeStep> complete_linkage(const CondensedDistanceMatrix& matrix);

// Applies every merge with height <= threshold, then numbers the resulting
// groups 1..K in order of their smallest member index.
ClusterAssignment cut_by_distance(const std::vector<MergeStep>& merges, std::size_t n,
                                  double threshold);

struct ClusteringResult {
    ClusterAssignment assignment;
    std::vector<MergeStep> merges;
    CondensedDistanceMatrix matrix;
};

ClusteringResult cluster_reports(const std::vector<CrashReport>& reports,
                                 const LibcPolicy& policy, const SimilarityConfig& config,
                                 unsigned jobs);

// Interop/debug dump: first line n, then one value per line in condensed
// order, with enough digits to round-trip a double.
void write_condensed_matrix(std::ostream& out, const CondensedDistanceMatrix& matrix);

} // namespace ct
