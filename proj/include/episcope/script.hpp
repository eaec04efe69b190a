#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "episcope/common.hpp"

namespace episcope {

enum class EntityType { character, object, location };

inline const char* to_string(EntityType t) {
    switch (t) {
        case EntityType::character: return "character";
        case EntityType::object: return "object";
        case EntityType::location: return "location";
    }
    return "?";
}

constexpr EntityType kEntityTypes[] = {EntityType::character, EntityType::object,
                                       EntityType::location};

struct Entity {
    std::string name;
    EntityType type = EntityType::character;
    std::string description;
};

// Per-shot schedule, split by type. Names reference the episode registry.
struct ShotSpec {
    int index = 0;  // 1-based
    int scene_id = 0;
    bool cut = false;
    std::string action_description;
    std::vector<std::string> characters;
    std::vector<std::string> objects;
    std::vector<std::string> locations;
    std::optional<std::vector<std::string>> first_appearances;

    std::vector<std::string> all_scheduled() const {
        std::vector<std::string> out(characters);
        out.insert(out.end(), objects.begin(), objects.end());
        out.insert(out.end(), locations.begin(), locations.end());
        return out;
    }
    const std::vector<std::string>& of_type(EntityType t) const {
        switch (t) {
            case EntityType::character: return characters;
            case EntityType::object: return objects;
            default: return locations;
        }
    }
};

struct EpisodeScript {
    std::string episode_id;
    std::string tier;  // easy | medium | hard
    std::string story_overview;
    std::vector<Entity> entities;
    std::vector<ShotSpec> shots;

    const Entity* find_entity(const std::string& name) const {
        for (const auto& e : entities)
            if (e.name == name) return &e;
        return nullptr;
    }
    int shot_count() const { return static_cast<int>(shots.size()); }
};

struct Violation {
    std::string message;
};

namespace detail {

inline void parse_entity_list(const nlohmann::json& arr, EntityType type,
                              std::vector<Entity>& out, const char* section) {
    if (!arr.is_array()) throw ParseError(std::string("entities.") + section + " must be an array");
    for (const auto& item : arr) {
        Entity e;
        e.type = type;
        if (!item.contains("name") || !item["name"].is_string())
            throw ParseError(std::string("entities.") + section + "[].name missing or not a string");
        if (!item.contains("description") || !item["description"].is_string())
            throw ParseError(std::string("entities.") + section +
                             "[].description missing or not a string");
        e.name = item["name"].get<std::string>();
        e.description = item["description"].get<std::string>();
        out.push_back(std::move(e));
    }
}

inline std::vector<std::string> parse_name_list(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + " must be an array of names");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ParseError(where + " entries must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace detail

// Parses one episode document. Schema errors name the offending field;
// semantic problems (unresolved names, ordering) are reported by
// validate_script and re-checked here so a parsed script is always valid.
inline EpisodeScript parse_script_json(const nlohmann::json& doc);

// Returns every invariant violation; empty means valid. Violations are data,
// not exceptions, so callers can report all of them at once.
inline std::vector<Violation> validate_script(const EpisodeScript& s) {
    std::vector<Violation> out;
    auto add = [&](std::string m) { out.push_back(Violation{std::move(m)}); };

    if (s.episode_id.empty()) add("episode_id is empty");
    if (s.tier != "easy" && s.tier != "medium" && s.tier != "hard")
        add("tier '" + s.tier + "' is not one of easy/medium/hard");

    std::map<std::string, int> name_count;
    for (const auto& e : s.entities) {
        if (e.name.empty()) add("entity with empty name");
        if (e.description.empty()) add("entity '" + e.name + "' has empty description");
        if (++name_count[e.name] == 2)
            add("duplicate entity name '" + e.name + "' declared more than once");
    }

    std::map<std::string, EntityType> registry;
    for (const auto& e : s.entities) registry.emplace(e.name, e.type);

    if (s.shots.empty()) add("episode has no shots");

    int prev_scene = 0;
    for (std::size_t i = 0; i < s.shots.size(); ++i) {
        const auto& shot = s.shots[i];
        const int expect = static_cast<int>(i) + 1;
        if (shot.index != expect)
            add("shot indices must be 1..K contiguous: position " + std::to_string(expect) +
                " has index " + std::to_string(shot.index));
        if (i == 0 && !shot.cut) add("episode must open with a cut (shot 1 has cut=false)");
        if (i > 0) {
            const int delta = shot.scene_id - prev_scene;
            if (shot.cut && delta != 1)
                add("scene_id must increment by 1 at cut shot " + std::to_string(shot.index));
            if (!shot.cut && delta != 0)
                add("scene_id must not change at non-cut shot " + std::to_string(shot.index));
        }
        prev_scene = shot.scene_id;

        for (EntityType t : kEntityTypes) {
            std::set<std::string> seen;
            for (const auto& name : shot.of_type(t)) {
                auto it = registry.find(name);
                if (it == registry.end())
                    add("unresolved entity " + name + " @ shot " + std::to_string(shot.index));
                else if (it->second != t)
                    add("entity " + name + " scheduled as " + to_string(t) + " but declared as " +
                        to_string(it->second) + " @ shot " + std::to_string(shot.index));
                if (!seen.insert(name).second)
                    add("entity " + name + " scheduled twice @ shot " + std::to_string(shot.index));
            }
        }
        if (shot.first_appearances) {
            std::set<std::string> sched;
            for (const auto& n : shot.all_scheduled()) sched.insert(n);
            for (const auto& n : *shot.first_appearances)
                if (!sched.contains(n))
                    add("first_appearances names unscheduled entity " + n + " @ shot " +
                        std::to_string(shot.index));
        }
    }

    // explicit first_appearances must be unique per entity and must not come
    // after an earlier scheduled occurrence
    std::map<std::string, int> first_seen;
    for (const auto& shot : s.shots)
        for (const auto& n : shot.all_scheduled())
            if (!first_seen.contains(n)) first_seen[n] = shot.index;
    std::map<std::string, int> declared_first;
    for (const auto& shot : s.shots) {
        if (!shot.first_appearances) continue;
        for (const auto& n : *shot.first_appearances) {
            auto [it, inserted] = declared_first.emplace(n, shot.index);
            if (!inserted)
                add("entity " + n + " declared first_appearance at shots " +
                    std::to_string(it->second) + " and " + std::to_string(shot.index));
            else if (first_seen.contains(n) && first_seen[n] < shot.index)
                add("entity " + n + " declared first_appearance at shot " +
                    std::to_string(shot.index) + " but already scheduled at shot " +
                    std::to_string(first_seen[n]));
        }
    }
    return out;
}

inline EpisodeScript parse_script_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("episode document must be a JSON object");
    EpisodeScript s;
    for (const char* field : {"episode_id", "tier", "story_overview"})
        if (!doc.contains(field) || !doc[field].is_string())
            throw ParseError(std::string(field) + " missing or not a string");
    s.episode_id = doc["episode_id"].get<std::string>();
    s.tier = doc["tier"].get<std::string>();
    s.story_overview = doc["story_overview"].get<std::string>();

    if (!doc.contains("entities") || !doc["entities"].is_object())
        throw ParseError("entities missing or not an object");
    const auto& ent = doc["entities"];
    detail::parse_entity_list(ent.value("characters", nlohmann::json::array()),
                              EntityType::character, s.entities, "characters");
    detail::parse_entity_list(ent.value("objects", nlohmann::json::array()), EntityType::object,
                              s.entities, "objects");
    detail::parse_entity_list(ent.value("locations", nlohmann::json::array()),
                              EntityType::location, s.entities, "locations");

    if (!doc.contains("shots") || !doc["shots"].is_array())
        throw ParseError("shots missing or not an array");
    for (const auto& js : doc["shots"]) {
        ShotSpec shot;
        if (!js.contains("index") || !js["index"].is_number_integer())
            throw ParseError("shots[].index missing or not an integer");
        shot.index = js["index"].get<int>();
        if (!js.contains("scene_id") || !js["scene_id"].is_number_integer())
            throw ParseError("shots[].scene_id missing or not an integer");
        shot.scene_id = js["scene_id"].get<int>();
        if (!js.contains("cut") || !js["cut"].is_boolean())
            throw ParseError("shots[].cut missing or not a boolean");
        shot.cut = js["cut"].get<bool>();
        if (!js.contains("action_description") || !js["action_description"].is_string())
            throw ParseError("shots[].action_description missing or not a string");
        shot.action_description = js["action_description"].get<std::string>();
        if (!js.contains("entity_schedule") || !js["entity_schedule"].is_object())
            throw ParseError("shots[].entity_schedule missing or not an object");
        const auto& sched = js["entity_schedule"];
        shot.characters = detail::parse_name_list(sched.value("characters", nlohmann::json::array()),
                                                  "entity_schedule.characters");
        shot.objects = detail::parse_name_list(sched.value("objects", nlohmann::json::array()),
                                               "entity_schedule.objects");
        shot.locations = detail::parse_name_list(sched.value("locations", nlohmann::json::array()),
                                                 "entity_schedule.locations");
        if (js.contains("first_appearances")) {
            shot.first_appearances =
                detail::parse_name_list(js["first_appearances"], "shots[].first_appearances");
        }
        s.shots.push_back(std::move(shot));
    }

    auto violations = validate_script(s);
    if (!violations.empty()) {
        std::string msg = "invalid episode '" + s.episode_id + "': " + violations.front().message;
        if (violations.size() > 1)
            msg += " (+" + std::to_string(violations.size() - 1) + " more)";
        throw ValidationError(msg);
    }
    return s;
}

inline EpisodeScript parse_script(const std::string& raw_document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(raw_document);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("episode document is not valid JSON: ") + e.what());
    }
    return parse_script_json(doc);
}

// First-appearance shot per entity: the explicit first_appearances marker when
// present, otherwise the first scheduled occurrence.
inline std::map<std::string, int> resolve_first_appearances(const EpisodeScript& s) {
    std::map<std::string, int> first;
    for (const auto& shot : s.shots) {
        if (!shot.first_appearances) continue;
        for (const auto& n : *shot.first_appearances) first.emplace(n, shot.index);
    }
    for (const auto& shot : s.shots)
        for (const auto& n : shot.all_scheduled()) first.emplace(n, shot.index);
    return first;
}

inline nlohmann::json script_to_json(const EpisodeScript& s) {
    nlohmann::json ent{{"characters", nlohmann::json::array()},
                       {"objects", nlohmann::json::array()},
                       {"locations", nlohmann::json::array()}};
    for (const auto& e : s.entities) {
        const char* key = e.type == EntityType::character ? "characters"
                          : e.type == EntityType::object  ? "objects"
                                                          : "locations";
        ent[key].push_back({{"name", e.name}, {"description", e.description}});
    }
    nlohmann::json shots = nlohmann::json::array();
    for (const auto& sh : s.shots) {
        nlohmann::json js{{"index", sh.index},
                          {"scene_id", sh.scene_id},
                          {"cut", sh.cut},
                          {"action_description", sh.action_description},
                          {"entity_schedule",
                           {{"characters", sh.characters},
                            {"objects", sh.objects},
                            {"locations", sh.locations}}}};
        if (sh.first_appearances) js["first_appearances"] = *sh.first_appearances;
        shots.push_back(std::move(js));
    }
    return nlohmann::json{{"episode_id", s.episode_id},
                          {"tier", s.tier},
                          {"story_overview", s.story_overview},
                          {"entities", std::move(ent)},
                          {"shots", std::move(shots)}};
}

}  // namespace episcope
