#include "lorenz/real.hpp"

#include <charconv>
#include <cstdio>

#include "lorenz/errors.hpp"

namespace lorenz::num {

std::string to_string(quad x, int digits)
{
    char buf[128];
    quadmath_snprintf(buf, sizeof buf, "%.*Qg", digits, x);
    return buf;
}

std::string to_string(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

quad parse_quad(const std::string& s)
{
    char* end = nullptr;
    quad x = strtoflt128(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Infeasible("not a number: '" + s + "'");
    return x;
}

} // namespace lorenz::num
