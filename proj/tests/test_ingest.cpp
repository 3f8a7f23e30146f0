#include <doctest.h>

#include <fstream>

#include "ingest.hpp"
#include "support/corpus.hpp"

using namespace ct;
using ct::testing::TempDir;
using ct::testing::thrown_code;
using ct::testing::write_file;

TEST_CASE("full frame line: address, function, source location") {
    const CallStack stack =
        parse_gdb_backtrace("#0  0x0000555555555131 in foo (x=1) at src/foo.c:10");
    REQUIRE(stack.size() == 1);
    const Frame& f = stack.frames()[0];
    CHECK(f.index == 0);
    CHECK(f.address == 0x555555555131);
    CHECK(f.function_name == "foo");
    CHECK(f.source_file == "src/foo.c");
    CHECK(f.source_line == 10);
    CHECK_FALSE(f.module_path.has_value());
}

TEST_CASE("library frame line: from <module>") {
    const CallStack stack = parse_gdb_backtrace(
        "#0  0x0000555555555131 in foo (x=1) at src/foo.c:10\n"
        "#1  0x00007ffff7df2083 in __libc_start_main () from /lib/x86_64-linux-gnu/libc.so.6");
    REQUIRE(stack.size() == 2);
    const Frame& f = stack.frames()[1];
    CHECK(f.address == 0x7ffff7df2083);
    CHECK(f.function_name == "__libc_start_main");
    CHECK(f.module_path == "/lib/x86_64-linux-gnu/libc.so.6");
    CHECK_FALSE(f.source_file.has_value());
}

TEST_CASE("?? means no function name") {
    const CallStack stack = parse_gdb_backtrace("#0  0x00007ffff7a52000 in ?? ()");
    CHECK_FALSE(stack.frames()[0].function_name.has_value());
    CHECK(stack.frames()[0].address == 0x7ffff7a52000);
}

TEST_CASE("frame without address parses") {
    const CallStack stack = parse_gdb_backtrace("#0  main (argc=1, argv=0x7fffffffe0a8) at main.c:42");
    const Frame& f = stack.frames()[0];
    CHECK_FALSE(f.address.has_value());
    CHECK(f.function_name == "main");
    CHECK(f.source_file == "main.c");
    CHECK(f.source_line == 42);
}

TEST_CASE("wrapped argument lists are glued back together") {
    const CallStack stack = parse_gdb_backtrace(
        "#0  handle (request=0x55555555a2a0,\n"
        "    flags=FLAG_A | FLAG_B,\n"
        "    out=0x0) at server.c:133\n"
        "#1  main () at server.c:20");
    REQUIRE(stack.size() == 2);
    CHECK(stack.frames()[0].function_name == "handle");
    CHECK(stack.frames()[0].source_file == "server.c");
    CHECK(stack.frames()[0].source_line == 133);
}

TEST_CASE("non-frame lines between frames are ignored") {
    const CallStack stack = parse_gdb_backtrace(
        "Program received signal SIGSEGV, Segmentation fault.\n"
        "#0  0x0000555555555131 in foo () at foo.c:1\n"
        "#1  0x0000555555555200 in bar () at bar.c:2");
    CHECK(stack.size() == 2);
}

TEST_CASE("argument text cannot fake a source clause") {
    // " at " inside parentheses or string literals belongs to the
    // arguments, not to the location suffix.
    const CallStack stack = parse_gdb_backtrace(
        R"(#0  f (s=") at bar.c:9", mode=at_end) at real.c:7)");
    const Frame& f = stack.frames()[0];
    CHECK(f.function_name == "f");
    CHECK(f.source_file == "real.c");
    CHECK(f.source_line == 7);
}

TEST_CASE("demangled names with parentheses keep their full name") {
    const CallStack stack = parse_gdb_backtrace(
        "#0  std::function<void (int)>::operator() (this=0x7ffc0) at /usr/include/c++/11/bits/std_function.h:590");
    CHECK(stack.frames()[0].function_name == "std::function<void (int)>::operator()");
    CHECK(stack.frames()[0].source_line == 590);
}

TEST_CASE("source clause without a line number") {
    const CallStack stack = parse_gdb_backtrace("#0  foo () at foo.c");
    CHECK(stack.frames()[0].source_file == "foo.c");
    CHECK_FALSE(stack.frames()[0].source_line.has_value());
}

TEST_CASE("text without frame lines has no frames") {
    CHECK(thrown_code([] { parse_gdb_backtrace("garbage\n"); }) == errc::no_frames_found);
    CHECK(thrown_code([] { parse_gdb_backtrace(""); }) == errc::no_frames_found);
}

TEST_CASE("unrecognizable frame lines are malformed") {
    CHECK(thrown_code([] { parse_gdb_backtrace("#0  <signal handler called>"); }) ==
          errc::malformed_frame);
    CHECK(thrown_code([] { parse_gdb_backtrace("#0  0xnothex in f () at a.c:1"); }) ==
          errc::malformed_frame);
    CHECK(thrown_code([] { parse_gdb_backtrace("#0"); }) == errc::malformed_frame);
}

TEST_CASE("frame numbering gaps are rejected") {
    CHECK(thrown_code([] {
              parse_gdb_backtrace("#0  f () at a.c:1\n#2  g () at b.c:2");
          }) == errc::non_consecutive_indices);
}

TEST_CASE("renderer round-trips every shape it can express") {
    std::vector<Frame> frames;
    Frame f0;
    f0.index = 0;
    f0.address = 0x55555555a000;
    f0.function_name = "crash_here";
    f0.source_file = "lib/parse.c";
    f0.source_line = 77;
    frames.push_back(f0);

    Frame f1;
    f1.index = 1;
    f1.address = 0x7ffff7df2083;
    f1.function_name = "__libc_start_main";
    f1.module_path = "/lib/x86_64-linux-gnu/libc.so.6";
    frames.push_back(f1);

    Frame f2;
    f2.index = 2;
    f2.address = 0x7ffff7a52000;
    frames.push_back(f2); // stripped: no symbol at all

    Frame f3;
    f3.index = 3;
    f3.function_name = "main";
    frames.push_back(f3); // symbol only, no address

    const CallStack stack(frames);
    CHECK(parse_gdb_backtrace(render_gdb_backtrace(stack)) == stack);
}

TEST_CASE("minimal report file") {
    const CrashReport report = parse_report_file(
        R"({"stacktrace": ["#0  0x0000555555555131 in foo () at foo.c:1"]})", "crash-7.report");
    CHECK(report.id == "crash-7");
    CHECK(report.stack.size() == 1);
    CHECK(report.mappings.empty());
}

TEST_CASE("explicit crash id wins over the filename stem") {
    const CrashReport report = parse_report_file(
        R"({"crash_id": "abc", "stacktrace": ["#0  foo () at foo.c:1"]})", "crash-7.report");
    CHECK(report.id == "abc");
}

TEST_CASE("stacktrace entries behave exactly like a joined backtrace") {
    const std::string l0 = "#0  0x0000555555555131 in foo (x=1) at src/foo.c:10";
    const std::string l1 = "#1  0x00007ffff7df2083 in bar () from /lib/libbar.so.2";
    const CrashReport report = parse_report_file(
        ct::testing::report_json_lines({l0, l1}), "a.report");
    CHECK(report.stack == parse_gdb_backtrace(l0 + "\n" + l1));
}

TEST_CASE("missing or broken schema fields carry a field path") {
    auto fails_with = [](const std::string& text, errc code, const std::string& needle) {
        try {
            parse_report_file(text, "x.report");
            FAIL_CHECK("expected a parse failure for: " << text);
        } catch (const Error& e) {
            CHECK(e.code() == code);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    fails_with("{}", errc::schema_error, "stacktrace");
    fails_with("not json at all", errc::schema_error, "JSON");
    fails_with(R"([1, 2])", errc::schema_error, "object");
    fails_with(R"({"stacktrace": "nope"})", errc::schema_error, "stacktrace");
    fails_with(R"({"stacktrace": [42]})", errc::schema_error, "stacktrace[0]");
    fails_with(R"({"crash_id": 9, "stacktrace": ["#0  f () at a.c:1"]})", errc::schema_error,
               "crash_id");
    fails_with(R"({"stacktrace": ["#0  f () at a.c:1"], "mappings": [{"start": "0x1"}]})",
               errc::schema_error, "mappings[0]");
    fails_with(
        R"({"stacktrace": ["#0  f () at a.c:1"],
            "mappings": [{"start": "zz", "end": "0x2", "offset": "0", "path": "l.so"}]})",
        errc::schema_error, "mappings[0].start");
    fails_with(
        R"({"stacktrace": ["#0  f () at a.c:1"],
            "mappings": [{"start": "0x2", "end": "0x1", "offset": "0", "path": "l.so"}]})",
        errc::schema_error, "mappings[0]");
}

TEST_CASE("empty stacktrace array is not a schema problem but an empty stack") {
    CHECK(thrown_code([] { parse_report_file(R"({"stacktrace": []})", "x.report"); }) ==
          errc::empty_stack);
}

TEST_CASE("mapping numbers accept hex strings, decimal strings, and integers") {
    const CrashReport report = parse_report_file(
        R"({"stacktrace": ["#0  f () at a.c:1"],
            "mappings": [{"start": "0x7f00", "end": "32768", "offset": 0, "path": "/lib/l.so"}]})",
        "x.report");
    REQUIRE(report.mappings.size() == 1);
    CHECK(report.mappings[0].start == 0x7f00);
    CHECK(report.mappings[0].end == 32768);
    CHECK(report.mappings[0].file_offset == 0);
    CHECK(report.mappings[0].path == "/lib/l.so");
}

TEST_CASE("directory loads are ordered by filename and tolerate bad files") {
    TempDir dir("ingest");
    write_file(dir.path() / "b.report", ct::testing::report_json({"beta", "main"}));
    write_file(dir.path() / "a.report", ct::testing::report_json({"alpha", "main"}));
    write_file(dir.path() / "c.report", "completely broken");

    const ReportBatch batch = load_report_dir(dir.path());
    REQUIRE(batch.reports.size() == 2);
    CHECK(batch.reports[0].id == "a");
    CHECK(batch.reports[1].id == "b");
    REQUIRE(batch.warnings.size() == 1);
    CHECK(batch.warnings[0].path.filename() == "c.report");
}

TEST_CASE("duplicate explicit crash ids are skipped with a warning") {
    TempDir dir("ingest-ids");
    const std::string id = "same";
    write_file(dir.path() / "a.report",
               ct::testing::report_json_lines({"#0  f () at a.c:1"}, &id));
    write_file(dir.path() / "b.report",
               ct::testing::report_json_lines({"#0  g () at b.c:1"}, &id));

    const ReportBatch batch = load_report_dir(dir.path());
    CHECK(batch.reports.size() == 1);
    CHECK(batch.reports[0].source_path.filename() == "a.report");
    CHECK(batch.warnings.size() == 1);
}

TEST_CASE("missing directory and all-bad directory are distinct failures") {
    TempDir dir("ingest-err");
    CHECK(thrown_code([&] { load_report_dir(dir.path() / "nope"); }) == errc::dir_not_found);

    CHECK(thrown_code([&] { load_report_dir(dir.path()); }) == errc::no_valid_reports);

    write_file(dir.path() / "junk.report", "{broken");
    CHECK(thrown_code([&] { load_report_dir(dir.path()); }) == errc::no_valid_reports);
}

TEST_CASE("address resolution against mappings") {
    Frame f;
    f.index = 0;
    f.address = 0x7f10;
    CrashReport report{"r", CallStack({f}), {Mapping{0x7f00, 0x8000, 0x0, "/lib/libc.so.6"}},
                       "r.report"};

    const CrashReport resolved = resolve_frame_offsets(report);
    CHECK(resolved.stack.frames()[0].module_path == "/lib/libc.so.6");
    CHECK(resolved.stack.frames()[0].module_offset == 0x10);

    // Idempotent: a second pass has nothing left to do.
    CHECK(resolve_frame_offsets(resolved) == resolved);
}

TEST_CASE("resolution leaves unresolvable frames alone") {
    Frame covered_twice;
    covered_twice.index = 0;
    covered_twice.address = 0x7f10;

    Frame uncovered;
    uncovered.index = 1;
    uncovered.address = 0x9999;

    Frame already;
    already.index = 2;
    already.address = 0x7f20;
    already.module_path = "/lib/other.so";
    already.module_offset = 0x5;

    CrashReport report{"r",
                       CallStack({covered_twice, uncovered, already}),
                       {Mapping{0x7f00, 0x8000, 0x0, "/lib/a.so"},
                        Mapping{0x7f00, 0x8000, 0x100, "/lib/b.so"}},
                       "r.report"};

    const CrashReport resolved = resolve_frame_offsets(report);
    // Two mappings cover the first address: ambiguous, left alone.
    CHECK_FALSE(resolved.stack.frames()[0].module_path.has_value());
    // No mapping covers the second.
    CHECK_FALSE(resolved.stack.frames()[1].module_path.has_value());
    // The third already had its offset.
    CHECK(resolved.stack.frames()[2].module_offset == 0x5);
    CHECK(resolved.stack.frames()[2].module_path == "/lib/other.so");
}
