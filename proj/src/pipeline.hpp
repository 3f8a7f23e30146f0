#pragma once

#include <filesystem>
#include <optional>

#include "hac.hpp"
#include "ingest.hpp"
#include "preprocess.hpp"
#include "report.hpp"

namespace ct {

struct RunOptions {
    SimilarityConfig config;
    LibcPolicy policy;
    unsigned jobs = 0; // 0 = one worker per available processor
    bool force = false;
    std::optional<std::filesystem::path> export_matrix;
};

// Summary of a directory run. Fields are optional because the two
// subcommands fill different subsets; timing covers only the phase named
// by the field, never ingestion.
struct RunStats {
    std::size_t report_count = 0;
    std::optional<std::size_t> unique_count;
    std::optional<std::size_t> cluster_count;
    std::optional<std::size_t> avg_per_cluster;
    std::optional<double> dedup_seconds;
    std::optional<double> clustering_seconds;
    std::vector<Warning> warnings;
};

// Moves duplicate report files into in_dir/duplicates/, keeping the first
// occurrence (lexicographic filename order) in place.
RunStats run_dedup_dir(const std::filesystem::path& in_dir, const RunOptions& options);

// Clusters every report in in_dir and copies each file into
// out_dir/cl<label>/. out_dir must be empty or absent unless force is set,
// in which case existing contents are removed first.
RunStats run_cluster_dir(const std::filesystem::path& in_dir,
                         const std::filesystem::path& out_dir, const RunOptions& options);

} // namespace ct
