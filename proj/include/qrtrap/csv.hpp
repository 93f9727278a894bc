#pragma once

// Locale-independent CSV writing and reading for observable series.

#include <qrtrap/errors.hpp>
#include <qrtrap/observables.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace qrtrap::csv {

/// 17 significant digits: parses back to the same double.
inline std::string exact(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

/// Four significant digits for human-facing summaries.
inline std::string brief(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ConfigError("csv: not a number: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline constexpr std::string_view series_header = "tau,rho_s,e_kin,e_pot,e_int,e_tot,norm_total";

inline void write_series(std::ostream& out, const ObservableSeries& series) {
    out << series_header << '\n';
    for (const auto& s : series.samples)
        out << exact(s.tau) << ',' << exact(s.rho_s) << ',' << exact(s.e_kin) << ',' << exact(s.e_pot) << ','
            << exact(s.e_int) << ',' << exact(s.e_tot) << ',' << exact(s.norm_total) << '\n';
}

/// Reads the columns written by write_series; peak_density is not stored.
inline std::vector<Sample> read_series(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != series_header) throw ConfigError("csv: missing series header");
    std::vector<Sample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 7) throw ConfigError("csv: expected 7 columns, got " + std::to_string(f.size()));
        out.push_back(Sample{parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                             parse_double(f[4]), parse_double(f[5]), parse_double(f[6]), 0.0});
    }
    return out;
}

}  // namespace qrtrap::csv
