#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace equiset {

// 17 significant digits: the shortest count that round-trips every double.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_real(const std::string& token, const char* context) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw std::invalid_argument(std::string(context) + ": expected a number, got '" + token +
                                    "'");
    }
    return v;
}

inline long long parse_int(const std::string& token, const char* context) {
    char* end = nullptr;
    const long long v = std::strtoll(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
        throw std::invalid_argument(std::string(context) + ": expected an integer, got '" +
                                    token + "'");
    }
    return v;
}

}  // namespace equiset
