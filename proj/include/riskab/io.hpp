#pragma once
// Byte-stable output formatting. Doubles are printed with the shortest
// round-trip representation (std::to_chars), so identical results serialize
// to identical bytes regardless of locale or worker count.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "riskab/errors.hpp"

namespace riskab {

inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string format_int(std::int64_t v) { return std::to_string(v); }

inline std::string format_uint(std::uint64_t v) { return std::to_string(v); }

// A CSV with '#'-prefixed header comments documenting each column, then a
// header row, then data rows.
struct CsvWriter {
    std::string buffer;

    void comment(std::string_view text) {
        buffer += "# ";
        buffer += text;
        buffer += '\n';
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buffer += ',';
            buffer += cells[i];
        }
        buffer += '\n';
    }
};

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

}  // namespace riskab
