#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "crashtriage.h"

namespace {

void print_warning(const char* path, const char* message, void*) {
    std::fprintf(stderr, "warning: %s: %s\n", path, message);
}

std::string format_count(long long value) {
    return value < 0 ? "-" : std::to_string(value);
}

std::string format_seconds(double value) {
    if (value < 0.0)
        return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", value);
    return buf;
}

void print_stats_table(const ct_run_stats& stats) {
    const std::pair<std::string, std::string> columns[] = {
        {"reports", std::to_string(stats.report_count)},
        {"unique", format_count(stats.unique_count)},
        {"clusters", format_count(stats.cluster_count)},
        {"avg/cluster", format_count(stats.avg_per_cluster)},
        {"clustering (s)", format_seconds(stats.clustering_seconds)},
        {"dedup (s)", format_seconds(stats.dedup_seconds)},
    };
    std::string header, row;
    for (const auto& [name, value] : columns) {
        const std::size_t width = std::max(name.size(), value.size());
        header += name + std::string(width - name.size() + 2, ' ');
        row += value + std::string(width - value.size() + 2, ' ');
    }
    while (!header.empty() && header.back() == ' ')
        header.pop_back();
    while (!row.empty() && row.back() == ' ')
        row.pop_back();
    std::printf("%s\n%s\n", header.c_str(), row.c_str());
}

int finish(ct_status status) {
    if (status == CT_OK)
        return 0;
    std::fprintf(stderr, "error: %s\n", ct_last_error());
    return status == CT_ERROR_OUTPUT_CONFLICT ? 2 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crashtriage: dedup and cluster crash reports by call-stack similarity"};
    app.require_subcommand(1);

    std::string in_dir, out_dir, export_path, libc_functions, libc_module;
    double coef_a = 0.04, coef_r = 0.13, threshold = 0.3;
    unsigned jobs = 0;
    bool no_trim = false, force = false;

    const auto add_trim_flags = [&](CLI::App* cmd) {
        cmd->add_flag("--no-trim", no_trim, "compare stacks without removing abort chains");
        cmd->add_option("--libc-functions", libc_functions,
                        "comma-separated abort-chain entry functions (replaces the default set)");
        cmd->add_option("--libc-module", libc_module,
                        "module basename substring that marks a frame as libc");
    };

    CLI::App* dedup =
        app.add_subcommand("dedup", "move exact-duplicate reports into <in_dir>/duplicates/");
    dedup->add_option("in_dir", in_dir, "directory of crash report files")->required();
    add_trim_flags(dedup);

    CLI::App* cluster =
        app.add_subcommand("cluster", "group reports into <out_dir>/cl1../clK directories");
    cluster->add_option("in_dir", in_dir, "directory of crash report files")->required();
    cluster->add_option("out_dir", out_dir, "destination for cluster directories")->required();
    cluster->add_option("--coef-a", coef_a, "top-frame depth coefficient (default 0.04)");
    cluster->add_option("--coef-r", coef_r, "frame-offset coefficient (default 0.13)");
    cluster->add_option("--threshold", threshold, "flat-cut distance threshold (default 0.3)");
    cluster->add_option("--jobs", jobs, "distance-matrix worker threads, 0 = all processors");
    cluster->add_option("--export-matrix", export_path,
                        "also write the condensed distance matrix to this file");
    cluster->add_flag("--force", force, "clear a non-empty output directory before writing");
    add_trim_flags(cluster);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    ct_options* options = ct_options_new();
    if (!options) {
        std::fprintf(stderr, "error: out of memory\n");
        return 1;
    }
    ct_status status = CT_OK;
    const auto apply = [&](ct_status s) {
        if (status == CT_OK)
            status = s;
    };
    apply(ct_options_set_coefficients(options, coef_a, coef_r));
    apply(ct_options_set_threshold(options, threshold));
    apply(ct_options_set_trim(options, no_trim ? 0 : 1));
    apply(ct_options_set_jobs(options, jobs));
    apply(ct_options_set_force(options, force ? 1 : 0));
    apply(ct_options_set_warning_handler(options, print_warning, nullptr));
    if (!libc_functions.empty())
        apply(ct_options_set_libc_functions(options, libc_functions.c_str()));
    if (!libc_module.empty())
        apply(ct_options_set_libc_module(options, libc_module.c_str()));
    if (!export_path.empty())
        apply(ct_options_set_export_matrix(options, export_path.c_str()));
    if (status != CT_OK) {
        ct_options_free(options);
        return finish(status);
    }

    ct_run_stats stats{};
    if (dedup->parsed()) {
        status = ct_dedup_directory(in_dir.c_str(), options, &stats);
        if (status == CT_OK) {
            const long long removed =
                static_cast<long long>(stats.report_count) - stats.unique_count;
            std::printf("kept %lld, removed %lld\n", stats.unique_count, removed);
            std::printf("dedup time: %.3f s\n", stats.dedup_seconds);
        }
    } else {
        status = ct_cluster_directory(in_dir.c_str(), out_dir.c_str(), options, &stats);
        if (status == CT_OK)
            print_stats_table(stats);
    }
    ct_options_free(options);
    return finish(status);
}
