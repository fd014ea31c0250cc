#ifndef WRISTMATCH_IMAGE_IO_HPP
#define WRISTMATCH_IMAGE_IO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "wristmatch/errors.hpp"
#include "wristmatch/image.hpp"

namespace wristmatch {
namespace detail {

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() { if (f) std::fclose(f); }
};

inline bool has_suffix(const std::string& s, const std::string& suf) {
    if (s.size() < suf.size()) return false;
    return std::equal(suf.rbegin(), suf.rend(), s.rbegin(),
                      [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                      });
}

inline RgbImage read_png_file(const std::string& path) {
    FileCloser fc{std::fopen(path.c_str(), "rb")};
    if (!fc.f) throw DataError("cannot open image: " + path);
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("png: allocation failure");
    }
    std::vector<png_bytep> rows;
    std::vector<unsigned char> buf;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("png: failed to decode " + path);
    }
    png_init_io(png, fc.f);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    buf.resize(static_cast<std::size_t>(w) * h * 3);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r)
        rows[r] = buf.data() + static_cast<std::size_t>(r) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage out{ImagePlane(static_cast<int>(w), static_cast<int>(h)),
                 ImagePlane(static_cast<int>(w), static_cast<int>(h)),
                 ImagePlane(static_cast<int>(w), static_cast<int>(h))};
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        out.r.data[i] = buf[3 * i + 0] / 255.0;
        out.g.data[i] = buf[3 * i + 1] / 255.0;
        out.b.data[i] = buf[3 * i + 2] / 255.0;
    }
    return out;
}

struct JpegErrorJmp {
    jpeg_error_mgr pub;
    std::jmp_buf env;
};

inline void jpeg_error_longjmp(j_common_ptr cinfo) {
    std::longjmp(reinterpret_cast<JpegErrorJmp*>(cinfo->err)->env, 1);
}

inline RgbImage read_jpeg_file(const std::string& path) {
    FileCloser fc{std::fopen(path.c_str(), "rb")};
    if (!fc.f) throw DataError("cannot open image: " + path);
    jpeg_decompress_struct cinfo;
    JpegErrorJmp jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_longjmp;

    // Declared before setjmp so cleanup after a longjmp stays well defined.
    RgbImage out;
    std::vector<unsigned char> row;
    if (setjmp(jerr.env)) {
        jpeg_destroy_decompress(&cinfo);
        throw DataError("jpeg: failed to decode " + path);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fc.f);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    out = RgbImage{ImagePlane(w, h), ImagePlane(w, h), ImagePlane(w, h)};
    row.resize(static_cast<std::size_t>(w) * 3);
    unsigned char* rp = row.data();
    while (cinfo.output_scanline < cinfo.output_height) {
        const int r = static_cast<int>(cinfo.output_scanline);
        jpeg_read_scanlines(&cinfo, &rp, 1);
        for (int c = 0; c < w; ++c) {
            out.r.at(r, c) = row[3 * c + 0] / 255.0;
            out.g.at(r, c) = row[3 * c + 1] / 255.0;
            out.b.at(r, c) = row[3 * c + 2] / 255.0;
        }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

inline unsigned char quantize8(double v) {
    return static_cast<unsigned char>(
        std::clamp(std::lround(v * 255.0), 0L, 255L));
}

} // namespace detail

/// Read an 8-bit PNG or JPEG into [0, 1] RGB. Format is picked by extension.
inline RgbImage read_image(const std::string& path) {
    if (detail::has_suffix(path, ".png")) return detail::read_png_file(path);
    if (detail::has_suffix(path, ".jpg") || detail::has_suffix(path, ".jpeg"))
        return detail::read_jpeg_file(path);
    throw DataError("unsupported image extension (need .png/.jpg): " + path);
}

/// Write [0, 1] RGB as 8-bit PNG.
inline void write_png(const std::string& path, const RgbImage& img) {
    if (img.empty()) throw UsageError("write_png: empty image");
    detail::FileCloser fc{std::fopen(path.c_str(), "wb")};
    if (!fc.f) throw DataError("cannot open for writing: " + path);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("png: allocation failure");
    }
    const int w = img.width();
    const int h = img.height();
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 3);
    std::vector<png_bytep> rows(h);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("png: failed to encode " + path);
    }
    png_init_io(png, fc.f);
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < h; ++r) {
        rows[r] = buf.data() + static_cast<std::size_t>(r) * w * 3;
        for (int c = 0; c < w; ++c) {
            buf[static_cast<std::size_t>(r) * w * 3 + 3 * c + 0] =
                detail::quantize8(img.r.at(r, c));
            buf[static_cast<std::size_t>(r) * w * 3 + 3 * c + 1] =
                detail::quantize8(img.g.at(r, c));
            buf[static_cast<std::size_t>(r) * w * 3 + 3 * c + 2] =
                detail::quantize8(img.b.at(r, c));
        }
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Write a binary mask as a 1-bit grayscale PNG (1 = foreground).
inline void write_mask_png(const std::string& path,
                           const std::vector<std::uint8_t>& mask, int w, int h) {
    if (w <= 0 || h <= 0 || mask.size() != static_cast<std::size_t>(w) * h)
        throw UsageError("write_mask_png: size mismatch");
    detail::FileCloser fc{std::fopen(path.c_str(), "wb")};
    if (!fc.f) throw DataError("cannot open for writing: " + path);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("png: allocation failure");
    }
    const int stride = (w + 7) / 8;
    std::vector<unsigned char> buf(static_cast<std::size_t>(stride) * h, 0);
    std::vector<png_bytep> rows(h);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("png: failed to encode " + path);
    }
    png_init_io(png, fc.f);
    png_set_IHDR(png, info, w, h, 1, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < h; ++r) {
        rows[r] = buf.data() + static_cast<std::size_t>(r) * stride;
        for (int c = 0; c < w; ++c)
            if (mask[static_cast<std::size_t>(r) * w + c])
                rows[r][c / 8] |= static_cast<unsigned char>(0x80u >> (c % 8));
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Read any PNG as a binary mask: nonzero luma = foreground.
inline std::vector<std::uint8_t> read_mask_png(const std::string& path, int& w,
                                               int& h) {
    const RgbImage img = detail::read_png_file(path);
    w = img.width();
    h = img.height();
    std::vector<std::uint8_t> mask(img.r.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = (img.r.data[i] + img.g.data[i] + img.b.data[i]) > 0.5 ? 1 : 0;
    return mask;
}

} // namespace wristmatch

#endif
