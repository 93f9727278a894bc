#pragma once

// Minimal INI-style reader used for species data, run configs and sweep plans.
//
//   # comment
//   key = value
//   [section]
//   key = value
//
// Keys are case-sensitive. Duplicate keys within a section and duplicate
// section names are errors. Unknown-key rejection is left to the consumer.

#include <qrtrap/errors.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace qrtrap::kv {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;  // empty for the leading global section
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
};

struct Document {
    std::vector<Section> sections;
    std::string source;
};

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline Document parse(std::istream& in, std::string source = "<input>") {
    Document doc;
    doc.source = std::move(source);
    doc.sections.push_back(Section{});
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& msg) { throw ConfigError(doc.source + ":" + std::to_string(line_no) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            std::string name(trim(line.substr(1, line.size() - 2)));
            if (name.empty()) fail("empty section name");
            for (const auto& s : doc.sections)
                if (s.name == name) fail("duplicate section [" + name + "]");
            doc.sections.push_back(Section{name, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail("empty key");
        auto& sec = doc.sections.back();
        if (sec.find(key)) fail("duplicate key '" + key + "'");
        sec.entries.push_back({std::move(key), std::move(value), line_no});
    }
    return doc;
}

inline Document parse_string(const std::string& text, std::string source = "<string>") {
    std::istringstream in(text);
    return parse(in, std::move(source));
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return parse(in, path);
}

inline double to_double(const Entry& e, std::string_view source = {}) {
    double v = 0.0;
    std::string_view s = e.value;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(std::string(source) + ":" + std::to_string(e.line) + ": '" + e.key +
                          "' expects a number, got '" + e.value + "'");
    return v;
}

inline long long to_integer(const Entry& e, std::string_view source = {}) {
    long long v = 0;
    const std::string_view s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(std::string(source) + ":" + std::to_string(e.line) + ": '" + e.key +
                          "' expects an integer, got '" + e.value + "'");
    return v;
}

/// Comma- or whitespace-separated list of numbers; "[]" or "" is empty.
inline std::vector<double> to_double_list(const Entry& e, std::string_view source = {}) {
    std::string s = e.value;
    for (char& c : s)
        if (c == ',' || c == '[' || c == ']') c = ' ';
    std::istringstream in(s);
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(to_double(Entry{e.key, token, e.line}, source));
    return out;
}

inline bool to_bool(const Entry& e, std::string_view source = {}) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError(std::string(source) + ":" + std::to_string(e.line) + ": '" + e.key + "' expects true or false");
}

}  // namespace qrtrap::kv
