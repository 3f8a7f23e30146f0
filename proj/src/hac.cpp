#include "hac.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include "similarity.hpp"

namespace ct {

CondensedDistanceMatrix pairwise_distances(const std::vector<std::vector<FrameKey>>& keys,
                                           const SimilarityConfig& config, unsigned jobs) {
    validate_config(config);
    const std::size_t n = keys.size();
    CondensedDistanceMatrix matrix(n);
    if (n < 2)
        return matrix;

    // Dense ids make the DP inner loop an integer compare instead of a
    // FrameKey compare. Interning is sequential, so ids are deterministic.
    KeyInterner interner;
    std::vector<std::vector<std::int32_t>> ids(n);
    std::size_t max_len = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = interner.intern(keys[i]);
        max_len = std::max(max_len, keys[i].size());
    }

    // normalizer(k) for every k we will need, accumulated in the same
    // order as normalizer() itself so the values are bit-identical.
    std::vector<double> norm(max_len + 1, 0.0);
    for (std::size_t k = 1; k <= max_len; ++k)
        norm[k] = norm[k - 1] + match_weight(k - 1, k - 1, config);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(matrix.values().size());
    for (std::uint32_t i = 0; i + 1 < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);

    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<std::size_t>(jobs, pairs.size());

    std::atomic<std::size_t> cursor{0};
    constexpr std::size_t chunk = 256;
    auto worker = [&] {
        DpWorkspace ws;
        for (;;) {
            const std::size_t begin = cursor.fetch_add(chunk, std::memory_order_relaxed);
            if (begin >= pairs.size())
                return;
            const std::size_t end = std::min(begin + chunk, pairs.size());
            for (std::size_t t = begin; t < end; ++t) {
                const auto [i, j] = pairs[t];
                const double score = weighted_lcs_score(ids[i], ids[j], config, ws);
                const double sim =
                    std::clamp(score / norm[std::min(ids[i].size(), ids[j].size())], 0.0, 1.0);
                matrix.values()[t] = 1.0 - sim;
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned w = 0; w < jobs; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return matrix;
}

std::vector<MergeStep> complete_linkage(const CondensedDistanceMatrix& matrix) {
    const std::size_t n = matrix.size();
    std::vector<MergeStep> merges;
    if (n < 2)
        return merges;
    merges.reserve(n - 1);

    // Full square working copy; Lance-Williams keeps it current after each
    // merge. O(n^2) memory and O(n^3) scans are fine at the target scale,
    // where the distance matrix itself already cost O(n^2) DP runs.
    std::vector<double> work(n * n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            work[i * n + j] = work[j * n + i] = matrix.at(i, j);

    std::vector<std::size_t> id(n);
    std::vector<std::size_t> members(n, 1);
    std::vector<char> active(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        id[i] = i;

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0, best_j = 0;
        std::size_t best_left = 0, best_right = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!active[i])
                continue;
            const double* row = work.data() + i * n;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j])
                    continue;
                const double d = row[j];
                const std::size_t left = std::min(id[i], id[j]);
                const std::size_t right = std::max(id[i], id[j]);
                if (d < best ||
                    (d == best && (left < best_left ||
                                   (left == best_left && right < best_right)))) {
                    best = d;
                    best_i = i;
                    best_j = j;
                    best_left = left;
                    best_right = right;
                }
            }
        }

        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_i || k == best_j)
                continue;
            const double d = std::max(work[best_i * n + k], work[best_j * n + k]);
            work[best_i * n + k] = work[k * n + best_i] = d;
        }
        members[best_i] += members[best_j];
        id[best_i] = n + step;
        active[best_j] = 0;
        merges.push_back(MergeStep{best_left, best_right, best, members[best_i]});
    }
    return merges;
}

ClusterAssignment cut_by_distance(const std::vector<MergeStep>& merges, std::size_t n,
                                  double threshold) {
    // Union-find over observation ids (0..n-1) plus one id per merge step
    // (n+s), mirroring the id scheme of complete_linkage.
    std::vector<std::size_t> parent(n + merges.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::size_t s = 0; s < merges.size(); ++s) {
        if (merges[s].height > threshold)
            continue;
        const std::size_t root = n + s;
        parent[find(merges[s].left)] = root;
        parent[find(merges[s].right)] = root;
    }

    ClusterAssignment out;
    out.labels.assign(n, 0);
    std::vector<std::size_t> label_of(parent.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (label_of[root] == 0)
            label_of[root] = ++out.count;
        out.labels[i] = label_of[root];
    }
    return out;
}

ClusteringResult cluster_reports(const std::vector<CrashReport>& reports,
                                 const LibcPolicy& policy, const SimilarityConfig& config,
                                 unsigned jobs) {
    if (reports.empty())
        raise(errc::invalid_argument, "cannot cluster an empty batch");
    std::vector<std::vector<FrameKey>> keys;
    keys.reserve(reports.size());
    for (const auto& report : reports)
        keys.push_back(prepared_keys(report.stack, policy, config));

    ClusteringResult result{ClusterAssignment{}, {}, pairwise_distances(keys, config, jobs)};
    result.merges = complete_linkage(result.matrix);
    result.assignment = cut_by_distance(result.merges, reports.size(), config.threshold);
    return result;
}

void write_condensed_matrix(std::ostream& out, const CondensedDistanceMatrix& matrix) {
    out << matrix.size() << '\n';
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::scientific << std::setprecision(16);
    for (const double v : matrix.values())
        out << v << '\n';
    out.flags(flags);
    out.precision(precision);
}

} // namespace ct
