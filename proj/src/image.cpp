#include "copyspace/image.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>
#include <zlib.h>

#include "copyspace/errors.hpp"

#include <csetjmp>

namespace copyspace {

namespace {

constexpr uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

bool looks_like_png(const std::vector<uint8_t>& bytes) {
    return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

bool looks_like_jpeg(const std::vector<uint8_t>& bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

// ---- PNG decode (libpng) ----

struct PngReadState {
    const uint8_t* data;
    size_t size;
    size_t offset;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->offset + count > state->size)
        png_error(png, "unexpected end of PNG stream");
    std::memcpy(out, state->data + state->offset, count);
    state->offset += count;
}

void png_throw_error(png_structp png, png_const_charp msg) {
    // Collect the message, then longjmp back to the decode call.
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    longjmp(png_jmpbuf(png), 1);
}

void png_quiet_warning(png_structp, png_const_charp) {}

ColorImage decode_png(const std::vector<uint8_t>& bytes) {
    std::string error_msg = "PNG decode failed";
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error_msg, png_throw_error,
                                             png_quiet_warning);
    if (!png) throw DecodeError("cannot allocate PNG reader");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("cannot allocate PNG info");
    }

    std::vector<png_bytep> row_ptrs;
    std::vector<uint8_t> raw;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("corrupt PNG: " + error_msg);
    }

    PngReadState state{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &state, png_mem_read);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const size_t row_bytes = png_get_rowbytes(png, info);
    raw.resize(row_bytes * height);
    row_ptrs.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) row_ptrs[y] = raw.data() + y * row_bytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (row_bytes < static_cast<size_t>(width) * 3)
        throw DecodeError("unexpected PNG row layout");

    ColorImage img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.data.resize(static_cast<size_t>(width) * height * 3);
    for (size_t y = 0; y < height; ++y) {
        const uint8_t* row = raw.data() + y * row_bytes;
        for (size_t x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c)
                img.data[(y * width + x) * 3 + c] = static_cast<float>(row[x * 3 + c]) / 255.0f;
    }
    return img;
}

// ---- JPEG decode (libjpeg) ----

struct JpegErrorMgr {
    jpeg_error_mgr base;
    jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_throw_error(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, mgr->message);
    longjmp(mgr->jump, 1);
}

ColorImage decode_jpeg(const std::vector<uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_throw_error;
    err.message[0] = '\0';

    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("corrupt JPEG: ") + err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    ColorImage img;
    img.width = static_cast<int>(cinfo.output_width);
    img.height = static_cast<int>(cinfo.output_height);
    img.data.resize(static_cast<size_t>(img.width) * img.height * 3);

    std::vector<uint8_t> row(static_cast<size_t>(img.width) * cinfo.output_components);
    uint8_t* row_ptr = row.data();
    while (cinfo.output_scanline < cinfo.output_height) {
        const size_t y = cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row_ptr, 1);
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                img.data[(y * img.width + x) * 3 + c] = static_cast<float>(row[x * 3 + c]) / 255.0f;
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

// ---- pinned PNG encode ----

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& payload) {
    put_u32_be(out, static_cast<uint32_t>(payload.size()));
    const size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32_be(out, static_cast<uint32_t>(crc));
}

uint8_t to_byte(float v) {
    const float clamped = std::min(1.0f, std::max(0.0f, v));
    return static_cast<uint8_t>(clamped * 255.0f + 0.5f);
}

// ---- size peeking ----

void peek_png_size(const std::vector<uint8_t>& bytes, int& width, int& height) {
    // signature(8) + IHDR length/type(8) + width(4) + height(4)
    if (bytes.size() < 24 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
        throw DecodeError("truncated PNG header");
    width = (bytes[16] << 24) | (bytes[17] << 16) | (bytes[18] << 8) | bytes[19];
    height = (bytes[20] << 24) | (bytes[21] << 16) | (bytes[22] << 8) | bytes[23];
    if (width <= 0 || height <= 0) throw DecodeError("invalid PNG dimensions");
}

void peek_jpeg_size(const std::vector<uint8_t>& bytes, int& width, int& height) {
    size_t i = 2;
    while (i + 4 <= bytes.size()) {
        if (bytes[i] != 0xFF) { ++i; continue; }
        const uint8_t marker = bytes[i + 1];
        if (marker == 0xFF) { ++i; continue; }
        // Start-of-frame markers carry the dimensions.
        const bool is_sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 &&
                            marker != 0xC8 && marker != 0xCC;
        if (marker == 0xD8 || (marker >= 0xD0 && marker <= 0xD9)) { i += 2; continue; }
        if (i + 4 > bytes.size()) break;
        const size_t seg_len = (static_cast<size_t>(bytes[i + 2]) << 8) | bytes[i + 3];
        if (is_sof) {
            if (i + 9 > bytes.size()) break;
            height = (bytes[i + 5] << 8) | bytes[i + 6];
            width = (bytes[i + 7] << 8) | bytes[i + 8];
            if (width <= 0 || height <= 0) throw DecodeError("invalid JPEG dimensions");
            return;
        }
        i += 2 + seg_len;
    }
    throw DecodeError("no JPEG frame header found");
}

} // namespace

ColorImage ColorImage::filled(int width, int height, float r, float g, float b) {
    ColorImage img;
    img.width = width;
    img.height = height;
    img.data.resize(static_cast<size_t>(width) * height * 3);
    for (size_t i = 0; i < img.data.size(); i += 3) {
        img.data[i] = r;
        img.data[i + 1] = g;
        img.data[i + 2] = b;
    }
    return img;
}

ColorImage decode_image(const std::vector<uint8_t>& bytes) {
    if (looks_like_png(bytes)) return decode_png(bytes);
    if (looks_like_jpeg(bytes)) return decode_jpeg(bytes);
    throw DecodeError("unsupported image format (expected PNG or JPEG)");
}

std::vector<uint8_t> encode_png(const ColorImage& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.data.size() != static_cast<size_t>(image.width) * image.height * 3)
        throw ArgumentError("cannot encode an empty or malformed image");

    // Raw scanlines, filter byte 0 (None) on every row. Filtering is pinned
    // so identical pixels always produce identical files.
    const size_t row_bytes = static_cast<size_t>(image.width) * 3;
    std::vector<uint8_t> raw((row_bytes + 1) * image.height);
    size_t pos = 0;
    for (int y = 0; y < image.height; ++y) {
        raw[pos++] = 0;
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) raw[pos++] = to_byte(image.at(x, y, c));
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                  6) != Z_OK)
        throw StorageError("zlib compression failed");
    compressed.resize(compressed_size);

    std::vector<uint8_t> out(kPngSignature, kPngSignature + 8);
    std::vector<uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<uint32_t>(image.width));
    put_u32_be(ihdr, static_cast<uint32_t>(image.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", {});
    return out;
}

void peek_image_size(const std::vector<uint8_t>& bytes, int& width, int& height) {
    if (looks_like_png(bytes)) return peek_png_size(bytes, width, height);
    if (looks_like_jpeg(bytes)) return peek_jpeg_size(bytes, width, height);
    throw DecodeError("unsupported image format (expected PNG or JPEG)");
}

ColorImage read_image_file(const std::string& path) { return decode_image(read_binary_file(path)); }

void write_png_file(const std::string& path, const ColorImage& image) {
    write_binary_file(path, encode_png(image));
}

void peek_image_file_size(const std::string& path, int& width, int& height) {
    peek_image_size(read_binary_file(path), width, height);
}

GrayImage to_luma(const ColorImage& image) {
    GrayImage gray;
    gray.width = image.width;
    gray.height = image.height;
    gray.data.resize(static_cast<size_t>(image.width) * image.height);
    for (size_t i = 0; i < gray.data.size(); ++i) {
        const double r = image.data[i * 3];
        const double g = image.data[i * 3 + 1];
        const double b = image.data[i * 3 + 2];
        const double luma = 0.2126 * r + 0.7152 * g + 0.0722 * b;
        gray.data[i] = std::min(1.0, std::max(0.0, luma));
    }
    return gray;
}

std::vector<uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open '" + path + "' for reading");
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw StorageError("read failed for '" + path + "'");
    return bytes;
}

void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StorageError("write failed for '" + path + "'");
}

} // namespace copyspace
