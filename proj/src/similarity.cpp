#include "similarity.hpp"

#include <algorithm>
#include <cmath>

namespace ct {

double match_weight(std::size_t i, std::size_t j, const SimilarityConfig& config) {
    return std::exp(-(config.rel_coef * static_cast<double>(rel_dist(i, j)) +
                      config.top_coef * static_cast<double>(top_dist(i, j))));
}

double addition(std::size_t i, std::size_t j, bool matched, const SimilarityConfig& config) {
    return matched ? match_weight(i, j, config) : 0.0;
}

double normalizer(std::size_t shorter_len, const SimilarityConfig& config) {
    // Same accumulation order as the diagonal of the score matrix, so
    // identical stacks divide to exactly 1.0.
    double sum = 0.0;
    for (std::size_t k = 0; k < shorter_len; ++k)
        sum += match_weight(k, k, config);
    return sum;
}

double weighted_lcs_score(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                          const SimilarityConfig& config, DpWorkspace& ws) {
    if (a.empty() || b.empty())
        raise(errc::empty_stack, "similarity is undefined on empty stacks");

    const std::size_t n = a.size();
    const std::size_t m = b.size();
    ws.resize(n + 1, m + 1);

    double* top = ws.row(0);
    std::fill(top, top + m + 1, 0.0);

    for (std::size_t i = 1; i <= n; ++i) {
        const double* prev = ws.row(i - 1);
        double* cur = ws.row(i);
        cur[0] = 0.0;
        const std::int32_t ai = a[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            double best = std::max(cur[j - 1], prev[j]);
            if (ai == b[j - 1]) {
                const double cand = prev[j - 1] + match_weight(i - 1, j - 1, config);
                if (cand > best)
                    best = cand;
            }
            cur[j] = best;
        }
    }
    return ws.at(n, m);
}

std::int32_t KeyInterner::id_for(const FrameKey& key) {
    auto [it, inserted] = ids_.try_emplace(key, static_cast<std::int32_t>(ids_.size()));
    return it->second;
}

std::vector<std::int32_t> KeyInterner::intern(const std::vector<FrameKey>& keys) {
    std::vector<std::int32_t> ids;
    ids.reserve(keys.size());
    for (const auto& key : keys)
        ids.push_back(id_for(key));
    return ids;
}

double similarity_keys(const std::vector<FrameKey>& a, const std::vector<FrameKey>& b,
                       const SimilarityConfig& config) {
    KeyInterner interner;
    const auto ids_a = interner.intern(a);
    const auto ids_b = interner.intern(b);
    DpWorkspace ws;
    const double raw = weighted_lcs_score(ids_a, ids_b, config, ws);
    const double norm = normalizer(std::min(ids_a.size(), ids_b.size()), config);
    return std::clamp(raw / norm, 0.0, 1.0);
}

double similarity(const CallStack& a, const CallStack& b, const SimilarityConfig& config) {
    return similarity_keys(key_sequence(a), key_sequence(b), config);
}

double distance(const CallStack& a, const CallStack& b, const SimilarityConfig& config) {
    return 1.0 - similarity(a, b, config);
}

} // namespace ct
