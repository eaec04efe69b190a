#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "episcope/backends.hpp"
#include "episcope/eval_config.hpp"
#include "episcope/media.hpp"
#include "episcope/metric_value.hpp"

namespace episcope {

// One shot's intra-shot quality row. Each entry is a per-shot sample feeding
// the episode mean: value, skip (shot too short for the metric) or failure.
struct ShotQuality {
    Sample subject_consistency;
    Sample temporal_flickering;
    Sample motion_smoothness;
    Sample dynamic_degree;
    Sample aesthetic_quality;  // [0, 1]
    Sample imaging_quality;    // [0, 100], native scale, never rescaled
};

// Mean adjacent-frame embedding dot product, clamped to [0, 1].
inline Sample subject_consistency(const VideoSource& shot, EmbeddingBackend& embed) {
    const int F = shot.frame_count();
    if (F < 2) return Sample::skip();
    std::vector<std::vector<double>> embs;
    embs.reserve(static_cast<std::size_t>(F));
    for (int i = 1; i <= F; ++i) {
        auto e = embed.embed(shot.frame(i));
        if (!e) return Sample::fail();
        embs.push_back(e.take());
    }
    double sum = 0.0;
    for (int i = 0; i + 1 < F; ++i) {
        double dot = 0.0;
        for (std::size_t d = 0; d < embs[static_cast<std::size_t>(i)].size(); ++d)
            dot += embs[static_cast<std::size_t>(i)][d] * embs[static_cast<std::size_t>(i + 1)][d];
        sum += dot;
    }
    return Sample::of(std::clamp(sum / (F - 1), 0.0, 1.0));
}

// 1 - mean adjacent-frame MAE (pixel values normalized to [0, 1]).
inline Sample temporal_flickering(const VideoSource& shot) {
    const int F = shot.frame_count();
    if (F < 2) return Sample::skip();
    double sum = 0.0;
    for (int i = 1; i + 1 <= F; ++i) sum += normalized_mae(shot.frame(i), shot.frame(i + 1));
    return Sample::of(1.0 - sum / (F - 1));
}

struct FlowMetrics {
    Sample motion_smoothness;
    Sample dynamic_degree;
};

// MS: mean interpolation-reconstruction quality over consecutive frame
// triplets. DD: fraction of adjacent pairs whose mean flow magnitude exceeds
// the threshold.
inline FlowMetrics flow_metrics(const VideoSource& shot, FlowBackend& flow, double dd_threshold) {
    FlowMetrics out;
    const int F = shot.frame_count();

    if (F < 3) {
        out.motion_smoothness = Sample::skip();
    } else {
        double sum = 0.0;
        int n = 0;
        bool failed = false;
        for (int i = 2; i + 1 <= F; ++i) {
            auto q = flow.interpolation_quality(shot.frame(i - 1), shot.frame(i), shot.frame(i + 1));
            if (!q) {
                failed = true;
                break;
            }
            sum += q.value();
            ++n;
        }
        out.motion_smoothness = failed ? Sample::fail() : Sample::of(sum / n);
    }

    if (F < 2) {
        out.dynamic_degree = Sample::skip();
    } else {
        int dynamic = 0;
        bool failed = false;
        for (int i = 1; i + 1 <= F; ++i) {
            auto mag = flow.mean_flow_magnitude(shot.frame(i), shot.frame(i + 1));
            if (!mag) {
                failed = true;
                break;
            }
            if (mag.value() > dd_threshold) ++dynamic;
        }
        out.dynamic_degree =
            failed ? Sample::fail() : Sample::of(static_cast<double>(dynamic) / (F - 1));
    }
    return out;
}

struct PredictorMetrics {
    Sample aesthetic;
    Sample imaging;
};

// Per-frame predictor means on their native scales.
inline PredictorMetrics predictor_metrics(const VideoSource& shot,
                                          ScalarPredictorBackend& aesthetic,
                                          ScalarPredictorBackend& imaging) {
    PredictorMetrics out;
    const int F = shot.frame_count();
    double a_sum = 0.0, i_sum = 0.0;
    bool a_fail = false, i_fail = false;
    for (int i = 1; i <= F; ++i) {
        if (!a_fail) {
            auto a = aesthetic.score(shot.frame(i));
            if (a)
                a_sum += a.value();
            else
                a_fail = true;
        }
        if (!i_fail) {
            auto q = imaging.score(shot.frame(i));
            if (q)
                i_sum += q.value();
            else
                i_fail = true;
        }
    }
    out.aesthetic = a_fail ? Sample::fail() : Sample::of(a_sum / F);
    out.imaging = i_fail ? Sample::fail() : Sample::of(i_sum / F);
    return out;
}

// All six intra-shot quality metrics over the full decoded frame range (not
// the grounding sample).
inline ShotQuality shot_quality(const VideoSource& shot, BackendSuite& backends,
                                const EvalConfig& cfg) {
    ShotQuality q;
    q.subject_consistency = subject_consistency(shot, *backends.embedding);
    q.temporal_flickering = temporal_flickering(shot);
    const auto fm = flow_metrics(shot, *backends.flow, cfg.dd_threshold);
    q.motion_smoothness = fm.motion_smoothness;
    q.dynamic_degree = fm.dynamic_degree;
    const auto pm = predictor_metrics(shot, *backends.aesthetic, *backends.imaging);
    q.aesthetic_quality = pm.aesthetic;
    q.imaging_quality = pm.imaging;
    return q;
}

}  // namespace episcope
