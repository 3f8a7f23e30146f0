#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "report.hpp"

namespace ct {

struct Warning {
    std::filesystem::path path;
    std::string message;
};

/// Reports loaded from one directory, ordered lexicographically by source
/// filename. Files that failed to parse are recorded as warnings, not
/// failures.
struct ReportBatch {
    std::vector<CrashReport> reports;
    std::vector<Warning> warnings;
};

/// Parses the `bt` output of gdb: one frame per `#<k>` line, with
/// continuation lines (gdb wraps long argument lists) joined onto the frame
/// they belong to. Text before the first frame line is ignored.
///
/// Recognized frame shapes:
///   #0  0x0000555555555131 in foo (x=1) at src/foo.c:10
///   #1  0x00007ffff7df2083 in __libc_start_main () from /lib/x86_64-linux-gnu/libc.so.6
///   #2  main (argc=1, argv=0x7ffd) at main.c:42
///   #3  0x0000555555555200 in ?? ()
///   #4  0x00007ffff7a54321
///
/// `??` yields a frame without a function name (stripped binaries).
CallStack parse_gdb_backtrace(std::string_view text);

/// Renders a stack back to gdb-style frame lines. Debug helper; only frames
/// expressible in the gdb grammar (address or function present) are
/// accepted, and a frame's module_offset is not representable.
std::string render_gdb_backtrace(const CallStack& stack);

/// Parses one report file. The format is a single JSON object:
///   "crash_id"   optional string, defaults to the filename stem
///   "stacktrace" required non-empty array of gdb-style frame lines
///   "mappings"   optional array of {"start","end","offset","path"},
///                numbers as decimal or 0x-prefixed hex strings
CrashReport parse_report_file(std::string_view bytes, const std::filesystem::path& path);

/// Loads every regular file of a directory (non-recursive). Unparseable
/// files become warnings; the batch is ordered lexicographically by
/// filename. Throws dir_not_found / no_valid_reports.
ReportBatch load_report_dir(const std::filesystem::path& dir);

/// Rebases frame addresses onto their mapped objects: each frame that has an
/// address but no module_offset, and whose address falls inside exactly one
/// mapping, gets module_path/module_offset filled in. Idempotent; frames
/// that cannot be resolved pass through untouched.
CrashReport resolve_frame_offsets(CrashReport report);

} // namespace ct
