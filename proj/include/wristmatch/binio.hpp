#ifndef WRISTMATCH_BINIO_HPP
#define WRISTMATCH_BINIO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "wristmatch/errors.hpp"

namespace wristmatch {

/// Little-endian primitive I/O for the versioned model/feature containers.
/// Serialized doubles round-trip bit-exactly: values are copied to and from
/// their IEEE-754 bit patterns, never reformatted through text.
namespace binio {

static_assert(std::endian::native == std::endian::little,
              "serializers assume a little-endian host");

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os) throw DataError("binio: short write");
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw DataError("binio: truncated input");
}

template <typename T>
void write_pod(std::ostream& os, T v) {
    write_bytes(os, &v, sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v;
    read_bytes(is, &v, sizeof(T));
    return v;
}

inline void write_u32(std::ostream& os, std::uint32_t v) { write_pod(os, v); }
inline void write_u64(std::ostream& os, std::uint64_t v) { write_pod(os, v); }
inline void write_f32(std::ostream& os, float v) { write_pod(os, v); }
inline void write_f64(std::ostream& os, double v) { write_pod(os, v); }
inline std::uint32_t read_u32(std::istream& is) { return read_pod<std::uint32_t>(is); }
inline std::uint64_t read_u64(std::istream& is) { return read_pod<std::uint64_t>(is); }
inline float read_f32(std::istream& is) { return read_pod<float>(is); }
inline double read_f64(std::istream& is) { return read_pod<double>(is); }

inline void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    write_bytes(os, s.data(), s.size());
}

inline std::string read_string(std::istream& is) {
    const std::uint32_t n = read_u32(is);
    if (n > (1u << 20)) throw DataError("binio: unreasonable string length");
    std::string s(n, '\0');
    if (n) read_bytes(is, s.data(), n);
    return s;
}

/// 8-byte magic at the head of every binary container.
inline void write_magic(std::ostream& os, const char magic[8]) {
    write_bytes(os, magic, 8);
}

inline void expect_magic(std::istream& is, const char magic[8],
                         const std::string& what) {
    char got[8];
    read_bytes(is, got, 8);
    if (std::memcmp(got, magic, 8) != 0)
        throw DataError(what + ": bad magic, not a " + what + " file");
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    return os;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open for reading: " + path);
    return is;
}

} // namespace binio
} // namespace wristmatch

#endif
