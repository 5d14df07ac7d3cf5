#pragma once
// Text helpers shared by the serializers, data files and the CLI.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dasg/errors.hpp"

namespace dasg {

/// Shortest decimal that round-trips to the same double; "inf" for +infinity.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// C99 hex-float ("0x1.8p+1"), bit-exact under parse_double.
inline std::string format_hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

/// Accepts decimal, hex-float, "inf"; rejects trailing garbage.
inline double parse_double(std::string_view text) {
    const std::string s(text);
    if (s.empty()) throw ParameterError("empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw ParameterError("malformed number '" + s + "'");
    return v;
}

inline int parse_int(std::string_view text) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ParameterError("malformed integer '" + std::string(text) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
        const auto start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r') ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T, class Fmt>
std::string join(const std::vector<T>& values, Fmt&& fmt, std::string_view sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += sep;
        out += fmt(values[i]);
    }
    return out;
}

inline std::string join_doubles(const std::vector<double>& v) { return join(v, format_double); }

inline std::string join_ints(const std::vector<int>& v) {
    return join(v, [](int i) { return std::to_string(i); });
}

}  // namespace dasg
