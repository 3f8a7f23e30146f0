#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "dedup.hpp"

namespace ct {
namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

ReportBatch load_and_resolve(const fs::path& in_dir) {
    ReportBatch batch = load_report_dir(in_dir);
    for (auto& report : batch.reports)
        report = resolve_frame_offsets(std::move(report));
    return batch;
}

} // namespace

RunStats run_dedup_dir(const fs::path& in_dir, const RunOptions& options) {
    ReportBatch batch = load_and_resolve(in_dir);

    const auto start = clock_type::now();
    const DedupOutcome outcome = dedup_reports(batch.reports, options.policy, options.config);

    if (!outcome.duplicates.empty()) {
        const fs::path dup_dir = in_dir / "duplicates";
        std::error_code ec;
        fs::create_directories(dup_dir, ec);
        if (ec)
            raise(errc::io_error, "cannot create " + dup_dir.string() + ": " + ec.message());
        for (const auto& [dup_index, kept_index] : outcome.duplicates) {
            (void)kept_index;
            const fs::path& src = batch.reports[dup_index].source_path;
            fs::rename(src, dup_dir / src.filename(), ec);
            if (ec)
                raise(errc::io_error, "cannot move " + src.string() + ": " + ec.message());
        }
    }

    RunStats stats;
    stats.report_count = batch.reports.size();
    stats.unique_count = outcome.kept.size();
    stats.dedup_seconds = seconds_since(start);
    stats.warnings = std::move(batch.warnings);
    return stats;
}

RunStats run_cluster_dir(const fs::path& in_dir, const fs::path& out_dir,
                         const RunOptions& options) {
    ReportBatch batch = load_and_resolve(in_dir);

    std::error_code ec;
    if (fs::exists(out_dir, ec)) {
        if (!fs::is_directory(out_dir, ec))
            raise(errc::output_conflict, out_dir.string() + " exists and is not a directory");
        if (!fs::is_empty(out_dir, ec)) {
            if (!options.force)
                raise(errc::output_conflict,
                      out_dir.string() + " is not empty (pass --force to overwrite)");
            for (const auto& entry : fs::directory_iterator(out_dir))
                fs::remove_all(entry.path());
        }
    } else {
        fs::create_directories(out_dir, ec);
        if (ec)
            raise(errc::io_error, "cannot create " + out_dir.string() + ": " + ec.message());
    }

    const auto start = clock_type::now();
    const ClusteringResult result =
        cluster_reports(batch.reports, options.policy, options.config, options.jobs);

    if (options.export_matrix) {
        std::ofstream out(*options.export_matrix);
        if (!out)
            raise(errc::io_error, "cannot write " + options.export_matrix->string());
        write_condensed_matrix(out, result.matrix);
    }

    const std::size_t k = result.assignment.count;
    for (std::size_t cluster = 1; cluster <= k; ++cluster) {
        fs::create_directory(out_dir / ("cl" + std::to_string(cluster)), ec);
        if (ec)
            raise(errc::io_error, "cannot create cluster directory: " + ec.message());
    }
    for (std::size_t i = 0; i < batch.reports.size(); ++i) {
        const fs::path& src = batch.reports[i].source_path;
        const fs::path dst =
            out_dir / ("cl" + std::to_string(result.assignment.labels[i])) / src.filename();
        fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec);
        if (ec)
            raise(errc::io_error, "cannot copy " + src.string() + ": " + ec.message());
    }

    RunStats stats;
    stats.report_count = batch.reports.size();
    stats.cluster_count = k;
    stats.avg_per_cluster = static_cast<std::size_t>(
        std::llround(static_cast<double>(batch.reports.size()) / static_cast<double>(k)));
    stats.clustering_seconds = seconds_since(start);
    stats.warnings = std::move(batch.warnings);
    return stats;
}

} // namespace ct
