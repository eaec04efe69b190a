#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "episcope/common.hpp"

namespace episcope {

// Frames are exchanged as raw 8-bit RGB buffers, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    static Image filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        Image img;
        img.width = w;
        img.height = h;
        img.rgb.resize(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
            img.rgb[i] = r;
            img.rgb[i + 1] = g;
            img.rgb[i + 2] = b;
        }
        return img;
    }

    std::uint8_t* px(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* px(int x, int y) const {
        return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    bool empty() const { return rgb.empty(); }
};

inline std::uint64_t fingerprint(const Image& img) {
    std::uint64_t h = fnv1a64(&img.width, sizeof img.width);
    h = fnv1a64(&img.height, sizeof img.height, h);
    return fnv1a64(img.rgb.data(), img.rgb.size(), h);
}

// ITU-R BT.601 luma weighting.
inline double luminance_at(const Image& img, int x, int y) {
    const std::uint8_t* p = img.px(x, y);
    return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
}

// Sharpness proxy: population variance of the 3x3 Laplacian
// [[0,1,0],[1,-4,1],[0,1,0]] of luminance, valid (interior) pixels only.
inline double laplacian_variance(const Image& img) {
    if (img.width < 3 || img.height < 3) return 0.0;
    std::vector<double> luma(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            luma[static_cast<std::size_t>(y) * img.width + x] = luminance_at(img, x, y);

    auto L = [&](int x, int y) { return luma[static_cast<std::size_t>(y) * img.width + x]; };
    const long n = static_cast<long>(img.width - 2) * (img.height - 2);
    double sum = 0.0, sum_sq = 0.0;
    for (int y = 1; y + 1 < img.height; ++y) {
        for (int x = 1; x + 1 < img.width; ++x) {
            const double r = L(x, y - 1) + L(x, y + 1) + L(x - 1, y) + L(x + 1, y) - 4.0 * L(x, y);
            sum += r;
            sum_sq += r * r;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    return var > 0.0 ? var : 0.0;
}

// Mean absolute pixel difference normalized to [0, 1].
inline double normalized_mae(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw IngestError("normalized_mae: image dimensions differ");
    if (a.rgb.empty()) return 0.0;
    long long total = 0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i)
        total += std::abs(static_cast<int>(a.rgb[i]) - static_cast<int>(b.rgb[i]));
    return static_cast<double>(total) / (static_cast<double>(a.rgb.size()) * 255.0);
}

// Fixed bilinear resampling (half-pixel centers, clamped edges). Pinned here
// rather than delegated so crops are bit-identical across library versions.
inline Image bilinear_resize(const Image& src, int out_w, int out_h) {
    Image dst;
    dst.width = out_w;
    dst.height = out_h;
    dst.rgb.resize(static_cast<std::size_t>(out_w) * out_h * 3);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double wx = fx - x0;
            std::uint8_t* out = dst.px(x, y);
            const std::uint8_t* p00 = src.px(x0, y0);
            const std::uint8_t* p10 = src.px(x1, y0);
            const std::uint8_t* p01 = src.px(x0, y1);
            const std::uint8_t* p11 = src.px(x1, y1);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] + (p10[c] - p00[c]) * wx;
                const double bot = p01[c] + (p11[c] - p01[c]) * wx;
                const double v = top + (bot - top) * wy;
                out[c] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
    }
    return dst;
}

struct Box {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
};

inline double area_pct(const Box& box, int frame_w, int frame_h) {
    const double frame_area = static_cast<double>(frame_w) * frame_h;
    return frame_area > 0 ? 100.0 * box.area() / frame_area : 0.0;
}

// Expands the box by pad_frac per side, clamps to frame bounds, extracts the
// pixel region and resizes to out_size x out_size.
inline Image crop_with_padding(const Image& frame, const Box& box, double pad_frac = 0.10,
                               int out_size = 224) {
    if (box.width() <= 0.0 || box.height() <= 0.0)
        throw CropError("crop_with_padding: degenerate (zero-area) box");
    const double pad_x = pad_frac * box.width();
    const double pad_y = pad_frac * box.height();
    const double px1 = std::max(0.0, box.x1 - pad_x);
    const double py1 = std::max(0.0, box.y1 - pad_y);
    const double px2 = std::min(static_cast<double>(frame.width), box.x2 + pad_x);
    const double py2 = std::min(static_cast<double>(frame.height), box.y2 + pad_y);

    const int ix1 = std::clamp(static_cast<int>(std::floor(px1)), 0, frame.width - 1);
    const int iy1 = std::clamp(static_cast<int>(std::floor(py1)), 0, frame.height - 1);
    const int ix2 = std::clamp(static_cast<int>(std::ceil(px2)), ix1 + 1, frame.width);
    const int iy2 = std::clamp(static_cast<int>(std::ceil(py2)), iy1 + 1, frame.height);

    Image region;
    region.width = ix2 - ix1;
    region.height = iy2 - iy1;
    region.rgb.resize(static_cast<std::size_t>(region.width) * region.height * 3);
    for (int y = 0; y < region.height; ++y) {
        const std::uint8_t* srow = frame.px(ix1, iy1 + y);
        std::uint8_t* drow = region.px(0, y);
        std::copy(srow, srow + static_cast<std::size_t>(region.width) * 3, drow);
    }
    return bilinear_resize(region, out_size, out_size);
}

inline Image mirror_horizontal(const Image& src) {
    Image dst = src;
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            const std::uint8_t* p = src.px(src.width - 1 - x, y);
            std::uint8_t* q = dst.px(x, y);
            q[0] = p[0];
            q[1] = p[1];
            q[2] = p[2];
        }
    return dst;
}

}  // namespace episcope
