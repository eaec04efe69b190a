#pragma once

#include <string>

#include <json.hpp>

#include "episcope/common.hpp"

namespace episcope {

// Canonical evaluation hyperparameters. Every field is recorded in the run
// manifest and participates in the comparability check.
struct EvalConfig {
    int n_frame = 5;                  // frames sampled per shot for grounding
    double tau_box = 0.25;            // detector box confidence threshold
    double tau_text = 0.20;           // detector text alignment threshold
    double tau_clip = 0.20;           // text-image threshold for present status
    double tau_fid = 0.50;            // cross-shot fidelity gate threshold
    double crop_padding = 0.10;       // padding per side around detection boxes
    int crop_size = 224;              // canonical crop resolution
    int action_grid_rows = 2;
    int action_grid_cols = 3;
    int n_shots_loc_set = 8;          // max shots per location judging set
    int n_frames_per_set = 2;         // frames per shot for location judging
    double dd_threshold = 1.0;        // mean flow magnitude for a "dynamic" pair

    std::string grounding_model = "IDEA-Research/grounding-dino-base";
    std::string embedding_model = "facebook/dinov2-base";
    std::string text_image_model = "openai/clip-vit-base-patch32";
    std::string judge_model = "gemini-2.5-pro";

    double judge_temperature = 0.0;
    int judge_parse_retries = 1;      // re-asks on unparseable verdicts
    int backend_max_attempts = 3;     // network retry budget
    int judge_requests_per_minute = 60;

    int action_grid_frames() const { return action_grid_rows * action_grid_cols; }
};

inline nlohmann::json eval_config_to_json(const EvalConfig& c) {
    return nlohmann::json{{"n_frame", c.n_frame},
                          {"tau_box", c.tau_box},
                          {"tau_text", c.tau_text},
                          {"tau_clip", c.tau_clip},
                          {"tau_fid", c.tau_fid},
                          {"crop_padding", c.crop_padding},
                          {"crop_size", c.crop_size},
                          {"action_grid_rows", c.action_grid_rows},
                          {"action_grid_cols", c.action_grid_cols},
                          {"n_shots_loc_set", c.n_shots_loc_set},
                          {"n_frames_per_set", c.n_frames_per_set},
                          {"dd_threshold", c.dd_threshold},
                          {"grounding_model", c.grounding_model},
                          {"embedding_model", c.embedding_model},
                          {"text_image_model", c.text_image_model},
                          {"judge_model", c.judge_model},
                          {"judge_temperature", c.judge_temperature},
                          {"judge_parse_retries", c.judge_parse_retries},
                          {"backend_max_attempts", c.backend_max_attempts},
                          {"judge_requests_per_minute", c.judge_requests_per_minute}};
}

inline EvalConfig eval_config_from_json(const nlohmann::json& j) {
    EvalConfig c;
    c.n_frame = j.value("n_frame", c.n_frame);
    c.tau_box = j.value("tau_box", c.tau_box);
    c.tau_text = j.value("tau_text", c.tau_text);
    c.tau_clip = j.value("tau_clip", c.tau_clip);
    c.tau_fid = j.value("tau_fid", c.tau_fid);
    c.crop_padding = j.value("crop_padding", c.crop_padding);
    c.crop_size = j.value("crop_size", c.crop_size);
    c.action_grid_rows = j.value("action_grid_rows", c.action_grid_rows);
    c.action_grid_cols = j.value("action_grid_cols", c.action_grid_cols);
    c.n_shots_loc_set = j.value("n_shots_loc_set", c.n_shots_loc_set);
    c.n_frames_per_set = j.value("n_frames_per_set", c.n_frames_per_set);
    c.dd_threshold = j.value("dd_threshold", c.dd_threshold);
    c.grounding_model = j.value("grounding_model", c.grounding_model);
    c.embedding_model = j.value("embedding_model", c.embedding_model);
    c.text_image_model = j.value("text_image_model", c.text_image_model);
    c.judge_model = j.value("judge_model", c.judge_model);
    c.judge_temperature = j.value("judge_temperature", c.judge_temperature);
    c.judge_parse_retries = j.value("judge_parse_retries", c.judge_parse_retries);
    c.backend_max_attempts = j.value("backend_max_attempts", c.backend_max_attempts);
    c.judge_requests_per_minute = j.value("judge_requests_per_minute", c.judge_requests_per_minute);
    return c;
}

}  // namespace episcope
