#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <opencv2/imgproc.hpp>

#include "episcope/backends.hpp"
#include "episcope/eval_config.hpp"
#include "episcope/media.hpp"
#include "episcope/media_opencv.hpp"
#include "episcope/script.hpp"

namespace episcope {

using Rgb = std::array<std::uint8_t, 3>;

// Fixed palette of 8 visually distinct colors, assigned in schedule order.
inline const std::vector<Rgb>& grid_palette() {
    static const std::vector<Rgb> palette = {
        Rgb{230, 25, 75},   // red
        Rgb{60, 180, 75},   // green
        Rgb{255, 225, 25},  // yellow
        Rgb{0, 130, 200},   // blue
        Rgb{245, 130, 48},  // orange
        Rgb{145, 30, 180},  // purple
        Rgb{70, 240, 240},  // cyan
        Rgb{240, 50, 230},  // magenta
    };
    return palette;
}

struct ActionGrid {
    Image image;  // rows x cols tiled frames, annotated
    std::vector<std::pair<std::string, Rgb>> legend;
    std::vector<std::string> not_localized;
    std::string legend_text;
    int frames_used = 0;
    int boxes_drawn = 0;
};

// Per-entity, per-grid-frame detections. Index i aligns with the i-th sampled
// grid frame; nullopt means the entity was not detected in that frame.
using GridDetections = std::map<std::string, std::vector<std::optional<Detection>>>;

struct GridDetectionResult {
    std::vector<int> frame_indices;
    GridDetections detections;
    std::vector<std::string> failures;
};

// Queries the detector on each grid frame for every scheduled character and
// object (locations are omitted from the grid). Keeps the best box per frame.
inline GridDetectionResult gather_grid_detections(const VideoSource& shot,
                                                  const std::vector<const Entity*>& entities,
                                                  GroundingBackend& grounding,
                                                  const EvalConfig& cfg) {
    GridDetectionResult out;
    out.frame_indices = even_sample_indices(shot.frame_count(), cfg.action_grid_frames());
    for (const Entity* e : entities) {
        if (e->type == EntityType::location) continue;
        auto& slots = out.detections[e->name];
        slots.assign(out.frame_indices.size(), std::nullopt);
        for (std::size_t i = 0; i < out.frame_indices.size(); ++i) {
            auto dets = grounding.detect(shot.frame(out.frame_indices[i]), e->description);
            if (!dets) {
                out.failures.push_back(e->name + " frame " +
                                       std::to_string(out.frame_indices[i]) + ": " + dets.error());
                continue;
            }
            const Detection* best = nullptr;
            for (const auto& d : dets.value())
                if (!best || d.confidence > best->confidence) best = &d;
            if (best) slots[i] = *best;
        }
    }
    return out;
}

// Tiles the sampled frames row-major into a rows x cols grid, drawing each
// entity's per-frame best box in its assigned color with a name label.
inline ActionGrid build_action_grid(const VideoSource& shot,
                                    const std::vector<const Entity*>& scheduled,
                                    const GridDetectionResult& dets, const EvalConfig& cfg) {
    ActionGrid grid;
    const int rows = cfg.action_grid_rows, cols = cfg.action_grid_cols;
    const int W = shot.width(), H = shot.height();
    cv::Mat canvas(rows * H, cols * W, CV_8UC3, cv::Scalar(0, 0, 0));

    // color assignment by schedule order, characters and objects only
    std::vector<const Entity*> boxed;
    for (const Entity* e : scheduled)
        if (e->type != EntityType::location) boxed.push_back(e);

    std::map<std::string, Rgb> color_of;
    for (std::size_t i = 0; i < boxed.size(); ++i) {
        const Rgb c = grid_palette()[i % grid_palette().size()];
        color_of[boxed[i]->name] = c;
        grid.legend.emplace_back(boxed[i]->name, c);
    }

    grid.frames_used = static_cast<int>(dets.frame_indices.size());
    for (std::size_t i = 0; i < dets.frame_indices.size(); ++i) {
        cv::Mat tile = to_mat(shot.frame(dets.frame_indices[i]));
        for (const Entity* e : boxed) {
            auto it = dets.detections.find(e->name);
            if (it == dets.detections.end() || !it->second[i]) continue;
            const Box& b = it->second[i]->box;
            const Rgb& c = color_of[e->name];
            const cv::Scalar bgr(c[2], c[1], c[0]);
            cv::rectangle(tile,
                          cv::Rect(cv::Point(static_cast<int>(b.x1), static_cast<int>(b.y1)),
                                   cv::Point(static_cast<int>(b.x2), static_cast<int>(b.y2))),
                          bgr, 2);
            cv::putText(tile, e->name,
                        cv::Point(static_cast<int>(b.x1) + 2,
                                  std::max(10, static_cast<int>(b.y1) - 4)),
                        cv::FONT_HERSHEY_SIMPLEX, 0.4, bgr, 1, cv::LINE_8);
            ++grid.boxes_drawn;
        }
        const int r = static_cast<int>(i) / cols, col = static_cast<int>(i) % cols;
        tile.copyTo(canvas(cv::Rect(col * W, r * H, W, H)));
    }
    grid.image = from_mat(canvas);

    for (const Entity* e : boxed) {
        auto it = dets.detections.find(e->name);
        const bool localized =
            it != dets.detections.end() &&
            std::any_of(it->second.begin(), it->second.end(),
                        [](const std::optional<Detection>& d) { return d.has_value(); });
        if (!localized) grid.not_localized.push_back(e->name);
    }

    std::string legend;
    static const char* kColorNames[] = {"red", "green", "yellow", "blue",
                                        "orange", "purple", "cyan", "magenta"};
    for (std::size_t i = 0; i < boxed.size(); ++i) {
        if (!legend.empty()) legend += "; ";
        legend += std::string(kColorNames[i % 8]) + " box = " + boxed[i]->name;
    }
    for (const auto& n : grid.not_localized) legend += "; " + n + " not localized";
    grid.legend_text = legend.empty() ? "(no boxed entities)" : legend;
    return grid;
}

}  // namespace episcope
