#pragma once

#include <array>
#include <string>
#include <vector>

#include "episcope/common.hpp"
#include "episcope/script.hpp"

namespace episcope {

// Criterion sets per entity type; shared verbatim between intra-shot fidelity
// and cross-shot pairwise judging.
inline const std::vector<std::string>& criteria_for(EntityType t) {
    static const std::vector<std::string> chars = {"face", "hair", "clothing", "build"};
    static const std::vector<std::string> objs = {"shape", "color_texture", "proportions",
                                                  "details"};
    static const std::vector<std::string> locs = {"layout", "color_mood", "landmarks",
                                                  "perspective"};
    switch (t) {
        case EntityType::character: return chars;
        case EntityType::object: return objs;
        default: return locs;
    }
}

constexpr const char* kPromptSchemaVersion = "v1";

namespace prompts {

inline std::string criteria_clause(EntityType t) {
    const auto& cs = criteria_for(t);
    std::string out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + cs[i] + "\"";
    }
    return out;
}

// Intra-shot fidelity: one canonical crop vs. the registry description.
inline std::string fidelity(const std::string& desc, EntityType type, bool weak_status) {
    std::string p =
        "You are scoring how faithfully the image depicts the described " +
        std::string(to_string(type)) +
        ".\n"
        "Description: " + desc +
        "\n"
        "Rate the overall match and each criterion on an integer scale of 1 (no match) to 10 "
        "(perfect match).\n"
        "Respond with JSON only: {\"overall\": <1-10>, \"criteria\": {" + criteria_clause(type) +
        " -> <1-10> each}}.";
    if (weak_status)
        p += "\nNote: the crop was localized with low confidence; score what is visible.";
    return p;
}

// Action fidelity over the labeled 2x3 frame grid.
inline std::string action(const std::string& action_text, const std::string& legend) {
    return "The image tiles six frames of one video shot in a 2x3 grid, in temporal order, "
           "row-major. Scheduled entities are marked with colored boxes.\n"
           "Legend: " + legend +
           "\n"
           "Scripted action: " + action_text +
           "\n"
           "Judge whether the shot depicts the scripted action. Respond with JSON only:\n"
           "{\"overall\": <1-10>, \"depicted\": <true|false>, \"subject_identity\": <1-10>, "
           "\"subject_action\": <1-10>, \"object_interaction\": <1-10 or null if the action "
           "references no object>, \"motion_quality\": <1-10>}.";
}

// Cross-shot identity: anchor crop vs. one comparison crop.
inline std::string pairwise(const std::string& desc, EntityType type) {
    return "Two crops from different shots of one generated video are shown: the first is the "
           "reference, the second is the comparison.\n"
           "Both are supposed to depict this " + std::string(to_string(type)) + ": " + desc +
           "\n"
           "Decide whether they show the same " + to_string(type) +
           " and rate the visual similarity per criterion on 1-10 (use null for a criterion "
           "that cannot be assessed).\n"
           "Respond with JSON only: {\"same\": <true|false>, \"similarity\": <1-10>, "
           "\"criteria\": {" + criteria_clause(type) + " -> <1-10 or null> each}}.";
}

// Camera-invariant location comparison over full frames.
inline std::string scene(const std::string& desc) {
    return "You are shown full frames from two different shots: first the reference shot, then "
           "the comparison shot.\n"
           "Both are supposed to depict this location: " + desc +
           "\n"
           "First describe the place visible in each frame for yourself, ignoring foreground "
           "people and objects; camera angle, distance, framing and partial views of the same "
           "place must NOT count as differences.\n"
           "Then decide whether the frames show the same physical location and rate similarity "
           "per criterion on 1-10 (null when not assessable).\n"
           "Respond with JSON only: {\"same\": <true|false>, \"similarity\": <1-10>, "
           "\"criteria\": {" + criteria_clause(EntityType::location) + " -> <1-10 or null> each}}.";
}

}  // namespace prompts

// Template fingerprints entering the run manifest. Hash covers the rendered
// template body with placeholder inputs plus the schema version, so any edit
// to the wording or schema flags runs as non-comparable.
struct PromptFingerprints {
    std::string fidelity;
    std::string action;
    std::string pairwise;
    std::string scene;
    std::string schema_version;
};

inline PromptFingerprints prompt_fingerprints() {
    PromptFingerprints f;
    f.schema_version = kPromptSchemaVersion;
    auto fp = [](const std::string& body) {
        return to_hex(fnv1a64(body, fnv1a64(kPromptSchemaVersion)));
    };
    std::string fid_all, pair_all;
    for (EntityType t : kEntityTypes) {
        fid_all += prompts::fidelity("<desc>", t, false);
        pair_all += prompts::pairwise("<desc>", t);
    }
    f.fidelity = fp(fid_all);
    f.action = fp(prompts::action("<action>", "<legend>"));
    f.pairwise = fp(pair_all);
    f.scene = fp(prompts::scene("<desc>"));
    return f;
}

}  // namespace episcope
