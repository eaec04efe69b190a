#pragma once

// OpenCV-backed decoding. Only targets that actually touch media files need
// this header (and the OpenCV link); the rest of the library stays STL-only.

#include <algorithm>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include "episcope/media.hpp"

namespace episcope {

inline cv::Mat to_mat(const Image& img) {
    cv::Mat rgb(img.height, img.width, CV_8UC3,
                const_cast<std::uint8_t*>(img.rgb.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

inline Image from_mat(const cv::Mat& bgr) {
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    Image img;
    img.width = rgb.cols;
    img.height = rgb.rows;
    img.rgb.assign(rgb.data, rgb.data + static_cast<std::size_t>(rgb.total()) * 3);
    return img;
}

inline void write_png(const Image& img, const std::filesystem::path& path) {
    if (!cv::imwrite(path.string(), to_mat(img)))
        throw IoError("imwrite failed: " + path.string());
}

// Shots are decoded eagerly so repeated frame access is bit-identical;
// VideoCapture seeking is not reliable enough for that invariant.
inline std::shared_ptr<VideoSource> open_container_video(const ShotKey& key,
                                                         const std::filesystem::path& path) {
    cv::VideoCapture cap(path.string());
    if (!cap.isOpened()) throw IngestError("cannot open video: " + path.string());
    std::vector<Image> frames;
    cv::Mat frame;
    while (cap.read(frame)) frames.push_back(from_mat(frame));
    if (frames.empty()) throw IngestError("video has no decodable frames: " + path.string());
    return std::make_shared<MemoryVideoSource>(key, std::move(frames));
}

inline std::shared_ptr<VideoSource> open_png_sequence(const ShotKey& key,
                                                      const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IngestError("png sequence is empty: " + dir.string());
    std::vector<Image> frames;
    for (const auto& f : files) {
        cv::Mat m = cv::imread(f.string(), cv::IMREAD_COLOR);
        if (m.empty()) throw IngestError("cannot decode png: " + f.string());
        frames.push_back(from_mat(m));
    }
    return std::make_shared<MemoryVideoSource>(key, std::move(frames));
}

// Shot layout: <videos_dir>/<episode_id>/shot_<k>.mp4 | shot_<k>.webm |
// shot_<k>/ (directory of PNG frames).
inline std::shared_ptr<VideoSource> open_video_source(const std::filesystem::path& videos_dir,
                                                      const std::string& episode_id,
                                                      int shot_index) {
    const ShotKey key{episode_id, shot_index};
    const auto base = videos_dir / episode_id / ("shot_" + std::to_string(shot_index));
    for (const char* ext : {".mp4", ".webm"}) {
        auto p = base;
        p += ext;
        if (std::filesystem::exists(p)) return open_container_video(key, p);
    }
    if (std::filesystem::is_directory(base)) return open_png_sequence(key, base);
    throw IngestError("no video found for " + key.str() + " under " + videos_dir.string());
}

}  // namespace episcope
