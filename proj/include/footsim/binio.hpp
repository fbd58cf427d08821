#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "footsim/core.hpp"

namespace footsim::binio {

/// Writes a double as 8 little-endian bytes regardless of host order.
inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    os.write(bytes, 8);
}

inline double read_f64(std::istream& is) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw Error("unexpected end of binary data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

inline void write_vec(std::ostream& os, Vec3 v) {
    write_f64(os, v.x);
    write_f64(os, v.y);
    write_f64(os, v.z);
}

inline Vec3 read_vec3(std::istream& is) {
    Vec3 v;
    v.x = read_f64(is);
    v.y = read_f64(is);
    v.z = read_f64(is);
    return v;
}

}  // namespace footsim::binio
