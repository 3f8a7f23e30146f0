#include "crashtriage.h"

#include <exception>
#include <memory>
#include <unordered_set>
#include <string>
#include <string_view>

#include "pipeline.hpp"
#include "preprocess.hpp"
#include "similarity.hpp"

struct ct_options {
    ct::RunOptions run;
    ct_warning_fn warn = nullptr;
    void* userdata = nullptr;
};

struct ct_stack {
    ct::CallStack stack;
};

namespace {

thread_local std::string t_last_error;

ct_status map_code(ct::errc code) {
    switch (code) {
    case ct::errc::invalid_argument: return CT_ERROR_INVALID_ARGUMENT;
    case ct::errc::empty_stack:
    case ct::errc::non_consecutive_indices:
    case ct::errc::no_frames_found:
    case ct::errc::malformed_frame: return CT_ERROR_PARSE;
    case ct::errc::schema_error: return CT_ERROR_SCHEMA;
    case ct::errc::dir_not_found:
    case ct::errc::no_valid_reports: return CT_ERROR_NO_INPUT;
    case ct::errc::io_error: return CT_ERROR_IO;
    case ct::errc::output_conflict: return CT_ERROR_OUTPUT_CONFLICT;
    }
    return CT_ERROR_INTERNAL;
}

template <typename Fn>
ct_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return CT_OK;
    } catch (const ct::Error& e) {
        t_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return CT_ERROR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return CT_ERROR_INTERNAL;
    }
}

ct_status fail_invalid(const char* message) {
    t_last_error = message;
    return CT_ERROR_INVALID_ARGUMENT;
}

const ct::RunOptions& effective(const ct_options* options) {
    static const ct::RunOptions defaults;
    return options ? options->run : defaults;
}

void fill_stats(ct_run_stats* out, const ct::RunStats& stats) {
    if (!out)
        return;
    out->report_count = stats.report_count;
    out->unique_count = stats.unique_count ? static_cast<long long>(*stats.unique_count) : -1;
    out->cluster_count =
        stats.cluster_count ? static_cast<long long>(*stats.cluster_count) : -1;
    out->avg_per_cluster =
        stats.avg_per_cluster ? static_cast<long long>(*stats.avg_per_cluster) : -1;
    out->dedup_seconds = stats.dedup_seconds.value_or(-1.0);
    out->clustering_seconds = stats.clustering_seconds.value_or(-1.0);
}

void emit_warnings(const ct_options* options, const std::vector<ct::Warning>& warnings) {
    if (!options || !options->warn)
        return;
    for (const auto& w : warnings)
        options->warn(w.path.string().c_str(), w.message.c_str(), options->userdata);
}

} // namespace

extern "C" {

const char* ct_status_name(ct_status status) {
    switch (status) {
    case CT_OK: return "ok";
    case CT_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case CT_ERROR_PARSE: return "parse_error";
    case CT_ERROR_SCHEMA: return "schema_error";
    case CT_ERROR_NO_INPUT: return "no_input";
    case CT_ERROR_IO: return "io_error";
    case CT_ERROR_OUTPUT_CONFLICT: return "output_conflict";
    case CT_ERROR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* ct_last_error(void) {
    return t_last_error.c_str();
}

ct_options* ct_options_new(void) {
    return new (std::nothrow) ct_options();
}

void ct_options_free(ct_options* options) {
    delete options;
}

ct_status ct_options_set_coefficients(ct_options* options, double top_coef, double rel_coef) {
    if (!options)
        return fail_invalid("options is NULL");
    return guarded([&] {
        ct::SimilarityConfig probe = options->run.config;
        probe.top_coef = top_coef;
        probe.rel_coef = rel_coef;
        ct::validate_config(probe);
        options->run.config = probe;
    });
}

ct_status ct_options_set_threshold(ct_options* options, double threshold) {
    if (!options)
        return fail_invalid("options is NULL");
    return guarded([&] {
        ct::SimilarityConfig probe = options->run.config;
        probe.threshold = threshold;
        ct::validate_config(probe);
        options->run.config = probe;
    });
}

ct_status ct_options_set_trim(ct_options* options, int enabled) {
    if (!options)
        return fail_invalid("options is NULL");
    options->run.config.trim_enabled = enabled != 0;
    return CT_OK;
}

ct_status ct_options_set_jobs(ct_options* options, unsigned jobs) {
    if (!options)
        return fail_invalid("options is NULL");
    options->run.jobs = jobs;
    return CT_OK;
}

ct_status ct_options_set_force(ct_options* options, int force) {
    if (!options)
        return fail_invalid("options is NULL");
    options->run.force = force != 0;
    return CT_OK;
}

ct_status ct_options_set_libc_module(ct_options* options, const char* substring) {
    if (!options || !substring || !*substring)
        return fail_invalid("module substring must be non-empty");
    options->run.policy.module_pattern = substring;
    return CT_OK;
}

ct_status ct_options_set_libc_functions(ct_options* options, const char* comma_separated) {
    if (!options || !comma_separated)
        return fail_invalid("function list is NULL");
    std::unordered_set<std::string> functions;
    std::string_view rest = comma_separated;
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        if (!item.empty())
            functions.insert(std::string(item));
        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
    }
    if (functions.empty())
        return fail_invalid("function list is empty");
    options->run.policy.trigger_functions = std::move(functions);
    return CT_OK;
}

ct_status ct_options_set_export_matrix(ct_options* options, const char* path) {
    if (!options)
        return fail_invalid("options is NULL");
    if (path && *path)
        options->run.export_matrix = std::filesystem::path(path);
    else
        options->run.export_matrix.reset();
    return CT_OK;
}

ct_status ct_options_set_warning_handler(ct_options* options, ct_warning_fn fn, void* userdata) {
    if (!options)
        return fail_invalid("options is NULL");
    options->warn = fn;
    options->userdata = userdata;
    return CT_OK;
}

ct_status ct_stack_parse_gdb(const char* text, ct_stack** out) {
    if (!text || !out)
        return fail_invalid("text and out must be non-NULL");
    *out = nullptr;
    return guarded([&] {
        auto stack = std::make_unique<ct_stack>(ct_stack{ct::parse_gdb_backtrace(text)});
        *out = stack.release();
    });
}

void ct_stack_free(ct_stack* stack) {
    delete stack;
}

size_t ct_stack_frame_count(const ct_stack* stack) {
    return stack ? stack->stack.size() : 0;
}

ct_status ct_stack_similarity(const ct_stack* a, const ct_stack* b, const ct_options* options,
                              double* out) {
    if (!a || !b || !out)
        return fail_invalid("stacks and out must be non-NULL");
    return guarded([&] {
        const ct::RunOptions& run = effective(options);
        *out = ct::similarity_keys(
            ct::prepared_keys(a->stack, run.policy, run.config),
            ct::prepared_keys(b->stack, run.policy, run.config), run.config);
    });
}

ct_status ct_stack_distance(const ct_stack* a, const ct_stack* b, const ct_options* options,
                            double* out) {
    const ct_status status = ct_stack_similarity(a, b, options, out);
    if (status == CT_OK)
        *out = 1.0 - *out;
    return status;
}

ct_status ct_dedup_directory(const char* in_dir, const ct_options* options,
                             ct_run_stats* stats) {
    if (!in_dir)
        return fail_invalid("in_dir is NULL");
    return guarded([&] {
        const ct::RunStats result = ct::run_dedup_dir(in_dir, effective(options));
        emit_warnings(options, result.warnings);
        fill_stats(stats, result);
    });
}

ct_status ct_cluster_directory(const char* in_dir, const char* out_dir,
                               const ct_options* options, ct_run_stats* stats) {
    if (!in_dir || !out_dir)
        return fail_invalid("in_dir and out_dir must be non-NULL");
    return guarded([&] {
        const ct::RunStats result = ct::run_cluster_dir(in_dir, out_dir, effective(options));
        emit_warnings(options, result.warnings);
        fill_stats(stats, result);
    });
}

} // extern "C"
