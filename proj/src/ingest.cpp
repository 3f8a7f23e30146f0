#include "ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ct {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool is_frame_start(std::string_view line) {
    return line.size() >= 2 && line[0] == '#' &&
           std::isdigit(static_cast<unsigned char>(line[1]));
}

struct TrailingClause {
    enum Kind { none, at, from } kind = none;
    std::string_view text;   // text after the marker
    std::size_t head_end = 0; // where the function+args part stops
};

// Finds the rightmost " at " / " from " that sits outside parentheses and
// string literals; gdb prints source/module clauses there, while argument
// values may contain both words.
TrailingClause find_trailing_clause(std::string_view s) {
    TrailingClause clause;
    clause.head_end = s.size();
    int depth = 0;
    bool in_quote = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_quote) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_quote = false;
            continue;
        }
        switch (c) {
        case '"': in_quote = true; continue;
        case '(': ++depth; continue;
        case ')': --depth; continue;
        default: break;
        }
        if (depth != 0)
            continue;
        if (s.compare(i, 4, " at ") == 0) {
            clause.kind = TrailingClause::at;
            clause.text = s.substr(i + 4);
            clause.head_end = i;
        } else if (s.compare(i, 6, " from ") == 0) {
            clause.kind = TrailingClause::from;
            clause.text = s.substr(i + 6);
            clause.head_end = i;
        }
    }
    return clause;
}

// The argument list is the last parenthesized group at nesting level zero,
// and it must close the string; what precedes it is the function name.
// Demangled C++ names may themselves contain balanced parentheses.
bool split_function_and_args(std::string_view head, std::string_view& name) {
    int depth = 0;
    bool in_quote = false;
    std::size_t open_pos = std::string_view::npos;
    std::size_t close_pos = std::string_view::npos;
    for (std::size_t i = 0; i < head.size(); ++i) {
        const char c = head[i];
        if (in_quote) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_quote = false;
            continue;
        }
        if (c == '"') {
            in_quote = true;
        } else if (c == '(') {
            if (depth == 0)
                open_pos = i;
            ++depth;
        } else if (c == ')') {
            --depth;
            if (depth == 0)
                close_pos = i;
            else if (depth < 0)
                return false;
        }
    }
    if (depth != 0 || close_pos != head.size() - 1 || open_pos == std::string_view::npos)
        return false;
    name = trim(head.substr(0, open_pos));
    return true;
}

bool parse_hex_digits(std::string_view s, std::uint64_t& value, std::size_t& consumed) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value, 16);
    if (ec != std::errc() || ptr == first)
        return false;
    consumed = static_cast<std::size_t>(ptr - first);
    return true;
}

Frame parse_frame_text(std::string_view chunk) {
    Frame frame;

    // "#<k>"
    std::string_view s = chunk;
    s.remove_prefix(1);
    std::uint64_t index = 0;
    const char* idx_end = nullptr;
    {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), index, 10);
        if (ec != std::errc())
            raise(errc::malformed_frame, "bad frame number: " + std::string(chunk));
        idx_end = ptr;
    }
    frame.index = static_cast<std::size_t>(index);
    s.remove_prefix(static_cast<std::size_t>(idx_end - s.data()));
    s = trim(s);

    // optional "0x<addr>", optionally followed by "in"
    if (s.rfind("0x", 0) == 0) {
        std::uint64_t addr = 0;
        std::size_t used = 0;
        std::string_view digits = s.substr(2);
        if (!parse_hex_digits(digits, addr, used))
            raise(errc::malformed_frame, "bad address: " + std::string(chunk));
        std::string_view after = digits.substr(used);
        if (!after.empty() && !std::isspace(static_cast<unsigned char>(after.front())))
            raise(errc::malformed_frame, "bad address: " + std::string(chunk));
        frame.address = addr;
        s = trim(after);
        if (s.rfind("in ", 0) == 0)
            s = trim(s.substr(3));
    }

    const TrailingClause clause = find_trailing_clause(s);
    std::string_view head = trim(s.substr(0, clause.head_end));

    if (clause.kind == TrailingClause::at) {
        std::string_view loc = trim(clause.text);
        if (loc.empty())
            raise(errc::malformed_frame, "empty source location: " + std::string(chunk));
        const std::size_t colon = loc.find_last_of(':');
        bool have_line = false;
        if (colon != std::string_view::npos && colon + 1 < loc.size()) {
            std::uint32_t line = 0;
            auto [ptr, ec] =
                std::from_chars(loc.data() + colon + 1, loc.data() + loc.size(), line, 10);
            if (ec == std::errc() && ptr == loc.data() + loc.size() && line > 0) {
                frame.source_file = std::string(loc.substr(0, colon));
                frame.source_line = line;
                have_line = true;
            }
        }
        if (!have_line)
            frame.source_file = std::string(loc);
    } else if (clause.kind == TrailingClause::from) {
        std::string_view module = trim(clause.text);
        if (module.empty())
            raise(errc::malformed_frame, "empty module path: " + std::string(chunk));
        frame.module_path = std::string(module);
    }

    if (!head.empty()) {
        std::string_view name;
        if (!split_function_and_args(head, name)) {
            raise(errc::malformed_frame, "unrecognized frame shape: " + std::string(chunk));
        }
        if (!name.empty() && name != "??")
            frame.function_name = std::string(name);
    }

    if (!frame.address && !frame.function_name)
        raise(errc::malformed_frame,
              "frame has neither address nor function: " + std::string(chunk));
    return frame;
}

std::uint64_t parse_u64_field(const json& value, const std::string& where) {
    if (value.is_number_unsigned())
        return value.get<std::uint64_t>();
    if (value.is_number_integer()) {
        const auto v = value.get<std::int64_t>();
        if (v < 0)
            raise(errc::schema_error, where + ": negative value");
        return static_cast<std::uint64_t>(v);
    }
    if (!value.is_string())
        raise(errc::schema_error, where + ": expected hex or decimal string");
    std::string_view s = value.get_ref<const std::string&>();
    s = trim(s);
    int base = 10;
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
        base = 16;
        s.remove_prefix(2);
    }
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        raise(errc::schema_error, where + ": expected hex or decimal string");
    return out;
}

} // namespace

CallStack parse_gdb_backtrace(std::string_view text) {
    std::vector<std::string> chunks;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        line = trim(line);
        if (is_frame_start(line)) {
            chunks.emplace_back(line);
        } else if (!line.empty() && !chunks.empty()) {
            // gdb wraps long argument lists; glue the tail back on
            chunks.back().push_back(' ');
            chunks.back().append(line);
        }
        if (eol == std::string_view::npos)
            break;
        pos = eol + 1;
    }
    if (chunks.empty())
        raise(errc::no_frames_found, "no #<n> frame lines in backtrace");

    std::vector<Frame> frames;
    frames.reserve(chunks.size());
    for (const auto& chunk : chunks)
        frames.push_back(parse_frame_text(chunk));
    return CallStack(std::move(frames));
}

std::string render_gdb_backtrace(const CallStack& stack) {
    std::string out;
    char addr_buf[32];
    for (const auto& frame : stack.frames()) {
        if (!frame.address && !frame.function_name)
            raise(errc::invalid_argument,
                  "frame " + std::to_string(frame.index) + " not expressible as a gdb line");
        out += '#';
        out += std::to_string(frame.index);
        out += "  ";
        if (frame.address) {
            std::snprintf(addr_buf, sizeof addr_buf, "0x%016" PRIx64, *frame.address);
            out += addr_buf;
            out += " in ";
        }
        out += frame.function_name ? *frame.function_name : "??";
        out += " ()";
        if (frame.source_file) {
            out += " at ";
            out += *frame.source_file;
            if (frame.source_line) {
                out += ':';
                out += std::to_string(*frame.source_line);
            }
        } else if (frame.module_path) {
            out += " from ";
            out += *frame.module_path;
        }
        out += '\n';
    }
    return out;
}

CrashReport parse_report_file(std::string_view bytes, const std::filesystem::path& path) {
    const json doc = json::parse(bytes, nullptr, false);
    if (doc.is_discarded())
        raise(errc::schema_error, "not valid JSON");
    if (!doc.is_object())
        raise(errc::schema_error, "$: expected a JSON object");

    std::string id = path.stem().string();
    if (const auto it = doc.find("crash_id"); it != doc.end()) {
        if (!it->is_string())
            raise(errc::schema_error, "crash_id: expected string");
        id = it->get<std::string>();
    }

    const auto trace_it = doc.find("stacktrace");
    if (trace_it == doc.end() || !trace_it->is_array())
        raise(errc::schema_error, "stacktrace: required array of frame lines");
    if (trace_it->empty())
        raise(errc::empty_stack, "stacktrace: empty");
    std::string joined;
    for (std::size_t i = 0; i < trace_it->size(); ++i) {
        const auto& entry = (*trace_it)[i];
        if (!entry.is_string())
            raise(errc::schema_error, "stacktrace[" + std::to_string(i) + "]: expected string");
        joined += entry.get_ref<const std::string&>();
        joined += '\n';
    }
    CallStack stack = parse_gdb_backtrace(joined);

    std::vector<Mapping> mappings;
    if (const auto it = doc.find("mappings"); it != doc.end()) {
        if (!it->is_array())
            raise(errc::schema_error, "mappings: expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& entry = (*it)[i];
            const std::string where = "mappings[" + std::to_string(i) + "]";
            if (!entry.is_object())
                raise(errc::schema_error, where + ": expected object");
            Mapping m;
            for (const char* field : {"start", "end", "offset", "path"})
                if (!entry.contains(field))
                    raise(errc::schema_error, where + "." + field + ": missing");
            m.start = parse_u64_field(entry["start"], where + ".start");
            m.end = parse_u64_field(entry["end"], where + ".end");
            m.file_offset = parse_u64_field(entry["offset"], where + ".offset");
            if (!entry["path"].is_string())
                raise(errc::schema_error, where + ".path: expected string");
            m.path = entry["path"].get<std::string>();
            try {
                validate_mapping(m);
            } catch (const Error& e) {
                raise(errc::schema_error, where + ": " + e.what());
            }
            mappings.push_back(std::move(m));
        }
    }

    return CrashReport{std::move(id), std::move(stack), std::move(mappings), path};
}

ReportBatch load_report_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        raise(errc::dir_not_found, "not a readable directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file())
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });

    ReportBatch batch;
    std::set<std::string> seen_ids;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            batch.warnings.push_back({file, "cannot open file"});
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            CrashReport report = parse_report_file(buf.str(), file);
            if (!seen_ids.insert(report.id).second) {
                batch.warnings.push_back({file, "duplicate crash id '" + report.id + "'"});
                continue;
            }
            batch.reports.push_back(std::move(report));
        } catch (const Error& e) {
            batch.warnings.push_back({file, e.what()});
        }
    }

    if (batch.reports.empty())
        raise(errc::no_valid_reports, "no valid reports in " + dir.string());
    return batch;
}

CrashReport resolve_frame_offsets(CrashReport report) {
    if (report.mappings.empty())
        return report;

    std::vector<Frame> frames = report.stack.frames();
    for (auto& frame : frames) {
        if (!frame.address || frame.module_offset)
            continue;
        const Mapping* hit = nullptr;
        bool ambiguous = false;
        for (const auto& m : report.mappings) {
            if (m.start <= *frame.address && *frame.address < m.end) {
                if (hit)
                    ambiguous = true;
                hit = &m;
            }
        }
        if (!hit || ambiguous)
            continue;
        frame.module_path = hit->path;
        frame.module_offset = *frame.address - hit->start + hit->file_offset;
    }
    report.stack = CallStack(std::move(frames));
    return report;
}

} // namespace ct
