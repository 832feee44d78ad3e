// format.cpp — to_chars-based number formatting

#include "dicke/format.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace dicke {

namespace {

std::string convert(double v, auto... spec) {
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v, spec...);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("format: to_chars failed");
    }
    return std::string(buf, res.ptr);
}

} // namespace

std::string format_double(double v) {
    return convert(v);
}

std::string format_fixed(double v, int digits) {
    return convert(v, std::chars_format::fixed, digits);
}

} // namespace dicke
