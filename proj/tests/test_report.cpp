#include <doctest.h>

#include "report.hpp"
#include "support/corpus.hpp"

using namespace ct;
using ct::testing::thrown_code;

TEST_CASE("a frame needs at least one usable identity") {
    Frame f;
    f.index = 0;
    CHECK(thrown_code([&] { validate_frame(f); }) == errc::invalid_argument);

    f.address = 0x1234;
    CHECK_NOTHROW(validate_frame(f));
}

TEST_CASE("module offset without a module path is rejected") {
    Frame f;
    f.index = 0;
    f.address = 0x1234;
    f.module_offset = 0x10;
    CHECK(thrown_code([&] { validate_frame(f); }) == errc::invalid_argument);

    f.module_path = "/lib/libc.so.6";
    CHECK_NOTHROW(validate_frame(f));
}

TEST_CASE("source line without a source file is rejected") {
    Frame f;
    f.index = 0;
    f.function_name = "foo";
    f.source_line = 10;
    CHECK(thrown_code([&] { validate_frame(f); }) == errc::invalid_argument);

    f.source_file = "foo.c";
    CHECK_NOTHROW(validate_frame(f));
}

TEST_CASE("call stacks are non-empty") {
    CHECK(thrown_code([] { CallStack(std::vector<Frame>{}); }) == errc::empty_stack);
}

TEST_CASE("call stack frames must be numbered 0,1,2,...") {
    std::vector<Frame> frames(2);
    frames[0].index = 0;
    frames[0].function_name = "a";
    frames[1].index = 2;
    frames[1].function_name = "b";
    CHECK(thrown_code([&] { CallStack stack(frames); }) == errc::non_consecutive_indices);

    frames[1].index = 1;
    CHECK_NOTHROW(CallStack{frames});
}

TEST_CASE("mappings must span a non-empty address range") {
    Mapping m{0x2000, 0x1000, 0, "/lib/libc.so.6"};
    CHECK(thrown_code([&] { validate_mapping(m); }) == errc::invalid_argument);

    m.end = 0x3000;
    CHECK_NOTHROW(validate_mapping(m));
}

TEST_CASE("config validation bounds the knobs") {
    SimilarityConfig config;
    CHECK_NOTHROW(validate_config(config));

    config.top_coef = -0.1;
    CHECK(thrown_code([&] { validate_config(config); }) == errc::invalid_argument);

    config = SimilarityConfig{};
    config.rel_coef = -1.0;
    CHECK(thrown_code([&] { validate_config(config); }) == errc::invalid_argument);

    config = SimilarityConfig{};
    config.threshold = 1.5;
    CHECK(thrown_code([&] { validate_config(config); }) == errc::invalid_argument);
    config.threshold = -0.1;
    CHECK(thrown_code([&] { validate_config(config); }) == errc::invalid_argument);
}

TEST_CASE("default knobs match the documented defaults") {
    const SimilarityConfig config;
    CHECK(config.top_coef == 0.04);
    CHECK(config.rel_coef == 0.13);
    CHECK(config.threshold == 0.3);
    CHECK(config.trim_enabled);
}
