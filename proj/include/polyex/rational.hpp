#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyex {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline int rat_sign(const Rat& r) { return r < 0 ? -1 : (r > 0 ? 1 : 0); }

/// Parses "3", "-4/8", "2.5", "-0.125". Throws std::invalid_argument otherwise.
inline Rat parse_rational(std::string_view s) {
    auto fail = [&] { throw std::invalid_argument("bad rational: '" + std::string(s) + "'"); };
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) fail();

    bool neg = false;
    if (s.front() == '+' || s.front() == '-') {
        neg = s.front() == '-';
        s.remove_prefix(1);
        if (s.empty()) fail();
    }

    auto digits_to_int = [&](std::string_view d) -> BigInt {
        if (d.empty()) fail();
        BigInt v = 0;
        for (char c : d) {
            if (c < '0' || c > '9') fail();
            v = v * 10 + (c - '0');
        }
        return v;
    };

    Rat out;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        BigInt num = digits_to_int(s.substr(0, slash));
        BigInt den = digits_to_int(s.substr(slash + 1));
        if (den == 0) fail();
        out = Rat(num, den);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty() && fp.empty()) fail();
        BigInt num = ip.empty() ? BigInt(0) : digits_to_int(ip);
        BigInt den = 1;
        for (char c : fp) {
            if (c < '0' || c > '9') fail();
            num = num * 10 + (c - '0');
            den *= 10;
        }
        out = Rat(num, den);
    } else {
        out = Rat(digits_to_int(s));
    }
    return neg ? Rat(-out) : out;
}

/// Exact textual form, "p/q" or plain integer.
inline std::string rat_to_string(const Rat& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace polyex
