#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "episcope/backends.hpp"
#include "episcope/eval_config.hpp"
#include "episcope/media.hpp"
#include "episcope/metric_value.hpp"
#include "episcope/script.hpp"

namespace episcope {

enum class PresenceStatus { absent, weak, present };

inline const char* to_string(PresenceStatus s) {
    switch (s) {
        case PresenceStatus::absent: return "absent";
        case PresenceStatus::weak: return "weak";
        case PresenceStatus::present: return "present";
    }
    return "?";
}

struct SelectionScore {
    double clip = 0.0;   // CLIP text-image similarity of the crop, in [-1, 1]
    double sharp = 0.0;  // logistic((lap_var - 100) / 200)
    double area = 0.0;   // logistic((area_pct - 2) / 5)
    double composite = 0.0;
};

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Composite selection score: the product of the three components. A negative
// CLIP similarity makes the composite negative; such a crop can still be the
// argmax only when every candidate is negative, in which case status is weak
// anyway (present requires clip >= tau_clip).
inline SelectionScore selection_score(double clip_sim, double lap_var, double area_percent) {
    SelectionScore s;
    s.clip = clip_sim;
    s.sharp = logistic((lap_var - 100.0) / 200.0);
    s.area = logistic((area_percent - 2.0) / 5.0);
    s.composite = s.clip * s.sharp * s.area;
    return s;
}

// The canonical crop for one (shot, entity) pair.
struct GroundedAppearance {
    ShotKey shot;
    std::string entity;
    EntityType type = EntityType::character;
    PresenceStatus status = PresenceStatus::absent;
    std::optional<Image> crop;  // engaged unless status == absent
    int frame_index = 0;
    Box box;
    SelectionScore score;
    std::vector<std::string> frame_failures;  // partial per-frame backend failures
};

struct GroundingCandidate {
    int frame_index = 0;
    Box box;
    double confidence = 0.0;
    Image crop;
    SelectionScore score;
};

// Deterministic total order for the argmax: higher composite wins, then
// earlier frame, larger raw box area, smaller x1; the remaining coordinates
// break pathological exact ties so enumeration order can never matter.
inline bool candidate_better(const GroundingCandidate& a, const GroundingCandidate& b) {
    if (a.score.composite != b.score.composite) return a.score.composite > b.score.composite;
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    if (a.box.area() != b.box.area()) return a.box.area() > b.box.area();
    if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    if (a.box.x2 != b.box.x2) return a.box.x2 < b.box.x2;
    return a.box.y2 < b.box.y2;
}

// Unified grounding pass for one (shot, entity) pair: sample n_frame frames,
// pool detections, score every crop, pick the argmax and assign status.
// Frames that fail to ground are skipped and logged; the pair fails only if
// every sampled frame fails.
inline Fallible<GroundedAppearance> ground_entity(const VideoSource& shot, const Entity& entity,
                                                  const EvalConfig& cfg, BackendSuite& backends) {
    GroundedAppearance out;
    out.shot = shot.key();
    out.entity = entity.name;
    out.type = entity.type;

    auto indices = even_sample_indices(shot.frame_count(), cfg.n_frame);
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

    int frames_ok = 0;
    bool any_detection = false;
    std::vector<GroundingCandidate> candidates;
    for (int idx : indices) {
        const Image& frame = shot.frame(idx);
        auto dets = backends.grounding->detect(frame, entity.description);
        if (!dets) {
            out.frame_failures.push_back("frame " + std::to_string(idx) + ": " + dets.error());
            continue;
        }
        ++frames_ok;
        for (const auto& det : dets.value()) {
            any_detection = true;
            GroundingCandidate cand;
            cand.frame_index = idx;
            cand.box = det.box;
            cand.confidence = det.confidence;
            try {
                cand.crop = crop_with_padding(frame, det.box, cfg.crop_padding, cfg.crop_size);
            } catch (const CropError& e) {
                out.frame_failures.push_back("frame " + std::to_string(idx) + ": " + e.what());
                continue;
            }
            auto clip = backends.text_image->similarity(cand.crop, entity.description);
            if (!clip) {
                out.frame_failures.push_back("frame " + std::to_string(idx) +
                                             ": clip: " + clip.error());
                continue;
            }
            cand.score = selection_score(clip.value(), laplacian_variance(cand.crop),
                                         area_pct(det.box, frame.width, frame.height));
            candidates.push_back(std::move(cand));
        }
    }

    if (frames_ok == 0)
        return Fallible<GroundedAppearance>::fail("grounding failed on all sampled frames of " +
                                                  shot.key().str() + " for " + entity.name);

    if (!any_detection) {
        out.status = PresenceStatus::absent;
        return Fallible<GroundedAppearance>::ok(std::move(out));
    }
    if (candidates.empty())
        return Fallible<GroundedAppearance>::fail(
            "all candidate crops failed to score for " + entity.name + " in " + shot.key().str());

    const auto best = std::min_element(
        candidates.begin(), candidates.end(),
        [](const GroundingCandidate& a, const GroundingCandidate& b) {
            return candidate_better(a, b);
        });
    out.crop = std::move(best->crop);
    out.frame_index = best->frame_index;
    out.box = best->box;
    out.score = best->score;
    out.status = best->score.clip >= cfg.tau_clip ? PresenceStatus::present : PresenceStatus::weak;
    return Fallible<GroundedAppearance>::ok(std::move(out));
}

// Per-shot presence rate for one entity type. The returned row counts the
// shot: evaluated, skipped (nothing of the type scheduled) or failed (every
// scheduled entity of the type failed to ground).
inline MetricValue presence_rate(
    const std::vector<std::string>& scheduled_of_type,
    const std::map<std::string, Fallible<GroundedAppearance>>& appearances) {
    if (scheduled_of_type.empty()) return MetricValue::skipped(1);
    int known = 0, present = 0;
    for (const auto& name : scheduled_of_type) {
        const auto it = appearances.find(name);
        if (it == appearances.end() || !it->second.has_value()) continue;  // grounding failed
        ++known;
        if (it->second.value().status == PresenceStatus::present) ++present;
    }
    if (known == 0) return MetricValue::failed(1);
    return MetricValue::of(static_cast<double>(present) / known);
}

}  // namespace episcope
