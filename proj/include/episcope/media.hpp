#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "episcope/image.hpp"

namespace episcope {

struct ShotKey {
    std::string episode_id;
    int shot_index = 0;

    std::string str() const { return episode_id + "/shot_" + std::to_string(shot_index); }
    auto operator<=>(const ShotKey&) const = default;
};

// Read-only access to one decoded shot. Frame indices are 1-based; repeated
// access to the same index must return bit-identical pixels.
class VideoSource {
public:
    virtual ~VideoSource() = default;
    virtual const ShotKey& key() const = 0;
    virtual int frame_count() const = 0;
    virtual const Image& frame(int index_1based) const = 0;
    virtual int width() const = 0;
    virtual int height() const = 0;
};

class MemoryVideoSource : public VideoSource {
public:
    MemoryVideoSource(ShotKey key, std::vector<Image> frames)
        : key_(std::move(key)), frames_(std::move(frames)) {
        if (frames_.empty()) throw IngestError("video source with zero frames: " + key_.str());
    }
    const ShotKey& key() const override { return key_; }
    int frame_count() const override { return static_cast<int>(frames_.size()); }
    const Image& frame(int index_1based) const override {
        if (index_1based < 1 || index_1based > frame_count())
            throw IngestError("frame index out of range: " + key_.str() + " frame " +
                              std::to_string(index_1based));
        return frames_[static_cast<std::size_t>(index_1based - 1)];
    }
    int width() const override { return frames_.front().width; }
    int height() const override { return frames_.front().height; }

private:
    ShotKey key_;
    std::vector<Image> frames_;
};

struct FrameSample {
    int index = 0;  // 1-based
    const Image* image = nullptr;
    double sharpness = 0.0;
};

inline double sharpness(const Image& img) { return laplacian_variance(img); }

// Even sampling indices over [1, F]: idx_j = floor(1 + (j-1)(F-1)/(n-1)),
// which reproduces {1,25,50,75,100} for F=100, n=5. For F < n indices repeat.
inline std::vector<int> even_sample_indices(int frame_count, int n) {
    if (n < 1) throw IngestError("even sampling requires n >= 1");
    if (frame_count < 1) throw IngestError("even sampling requires at least one frame");
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        idx.push_back(1);
        return idx;
    }
    for (int j = 1; j <= n; ++j) {
        const double pos =
            1.0 + static_cast<double>(j - 1) * (frame_count - 1) / static_cast<double>(n - 1);
        idx.push_back(static_cast<int>(std::floor(pos)));
    }
    return idx;
}

inline std::vector<FrameSample> sample_evenly(const VideoSource& source, int n) {
    std::vector<FrameSample> out;
    for (int idx : even_sample_indices(source.frame_count(), n)) {
        const Image& img = source.frame(idx);
        out.push_back(FrameSample{idx, &img, sharpness(img)});
    }
    return out;
}

// Frame indices of a shot ranked by sharpness (desc), earlier frame wins ties.
inline std::vector<int> sharpness_ranked_indices(const VideoSource& source) {
    std::vector<std::pair<double, int>> ranked;
    for (int i = 1; i <= source.frame_count(); ++i)
        ranked.emplace_back(sharpness(source.frame(i)), i);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> out;
    out.reserve(ranked.size());
    for (const auto& [s, i] : ranked) out.push_back(i);
    return out;
}

}  // namespace episcope
