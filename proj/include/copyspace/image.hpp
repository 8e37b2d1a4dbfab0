#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace copyspace {

/// Interleaved RGB image, channel values in [0, 1], row-major.
struct ColorImage {
    int width = 0;
    int height = 0;
    std::vector<float> data; // size = width * height * 3

    float& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    float at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }

    static ColorImage filled(int width, int height, float r, float g, float b);
};

/// Single-channel intensity image, values in [0, 1], row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data; // size = width * height

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

/// Decodes PNG or JPEG bytes. The format is sniffed from the signature;
/// anything else (or a truncated stream) raises DecodeError. Gray and
/// gray+alpha inputs are expanded to RGB; alpha is dropped.
ColorImage decode_image(const std::vector<uint8_t>& bytes);

/// Encodes an image as an 8-bit RGB PNG. The encoder pins every degree of
/// freedom (filter mode, zlib level and strategy), so identical pixels always
/// produce identical bytes.
std::vector<uint8_t> encode_png(const ColorImage& image);

/// Reads just the dimensions from PNG or JPEG bytes without a full decode.
void peek_image_size(const std::vector<uint8_t>& bytes, int& width, int& height);

ColorImage read_image_file(const std::string& path);
void write_png_file(const std::string& path, const ColorImage& image);
void peek_image_file_size(const std::string& path, int& width, int& height);

/// Rec. 709 luma: 0.2126 R + 0.7152 G + 0.0722 B, clamped to [0, 1].
GrayImage to_luma(const ColorImage& image);

std::vector<uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes);

} // namespace copyspace
