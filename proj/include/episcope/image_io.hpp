#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "episcope/image.hpp"

namespace episcope {

// Binary PPM (P6). Chosen for audit artifacts because the byte stream is a
// pure function of the pixels, which keeps report emission idempotent.
inline void write_ppm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

inline Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
        throw IoError("not an 8-bit P6 PPM: " + path.string());
    in.get();  // single whitespace after header
    Image img;
    img.width = w;
    img.height = h;
    img.rgb.resize(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (!in) throw IoError("truncated PPM: " + path.string());
    return img;
}

}  // namespace episcope
