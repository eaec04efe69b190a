#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "episcope/script.hpp"

namespace episcope {

// Two gap notions coexist and are named apart on purpose:
//   intervening_gap(k_i, k_j) = k_j - k_i - 1   (dataset statistics)
//   index_gap(k_i, k_j)      = k_j - k_i        (gap-decay diagnostic, pillar 3)
// Conflating them shifts every gap table by one.

struct EntityStats {
    EntityType type = EntityType::character;
    std::vector<int> appearance_shots;                 // sorted shot indices
    std::optional<int> max_intervening_gap;            // absent for single appearances
    int persistence = 0;                               // longest consecutive-index run
    bool first_is_explicit = false;
    int first_shot = 0;
};

struct EpisodeStats {
    std::string episode_id;
    std::string tier;
    int shot_count = 0;

    std::map<std::string, EntityStats> per_entity;

    // per-type counters (index by EntityType cast to int)
    long registry_count[3] = {0, 0, 0};
    long scheduled_appearances[3] = {0, 0, 0};
    long unique_scheduled[3] = {0, 0, 0};
    long reappearances[3] = {0, 0, 0};                 // appearances - unique
    long recurring_entities[3] = {0, 0, 0};            // appear in >= 2 shots
    long cross_scene_recurring[3] = {0, 0, 0};         // appear in >= 2 scenes

    // structure
    std::vector<int> chain_lengths;                    // maximal runs between cuts
    int cut_count = 0;
    int within_episode_cuts = 0;                       // cuts at shot >= 2
    int carry_over_cuts = 0;                           // >=1 char/obj crosses the cut
    int memory_only_shots = 0;                         // zero first appearances in shot
    int registry_shots = 0;                            // >=1 first appearance in shot
    std::vector<int> new_entities_by_shot_index;       // first appearances per shot index

    double cut_rate() const {
        return shot_count ? static_cast<double>(cut_count) / shot_count : 0.0;
    }
};

inline void compute_entity_stats(const EpisodeScript& script, EpisodeStats& stats) {
    const auto first = resolve_first_appearances(script);
    std::map<std::string, std::vector<int>> shots_of;
    for (const auto& shot : script.shots)
        for (const auto& name : shot.all_scheduled()) shots_of[name].push_back(shot.index);

    for (const auto& e : script.entities) ++stats.registry_count[static_cast<int>(e.type)];

    std::map<std::string, std::set<int>> scenes_of;
    for (const auto& shot : script.shots)
        for (const auto& name : shot.all_scheduled()) scenes_of[name].insert(shot.scene_id);

    for (auto& [name, appearances] : shots_of) {
        const Entity* ent = script.find_entity(name);
        EntityStats es;
        es.type = ent->type;
        es.appearance_shots = appearances;  // shot order is already ascending
        es.first_shot = first.at(name);

        int best_run = 1, run = 1;
        std::optional<int> max_gap;
        for (std::size_t i = 1; i < appearances.size(); ++i) {
            const int gap = appearances[i] - appearances[i - 1] - 1;
            max_gap = std::max(max_gap.value_or(0), gap);
            run = (gap == 0) ? run + 1 : 1;
            best_run = std::max(best_run, run);
        }
        es.max_intervening_gap = max_gap;
        es.persistence = best_run;

        const int t = static_cast<int>(ent->type);
        stats.scheduled_appearances[t] += static_cast<long>(appearances.size());
        ++stats.unique_scheduled[t];
        stats.reappearances[t] += static_cast<long>(appearances.size()) - 1;
        if (appearances.size() >= 2) ++stats.recurring_entities[t];
        if (scenes_of[name].size() >= 2) ++stats.cross_scene_recurring[t];

        stats.per_entity.emplace(name, std::move(es));
    }

    // explicit markers recorded for audit
    for (const auto& shot : script.shots) {
        if (!shot.first_appearances) continue;
        for (const auto& n : *shot.first_appearances) {
            auto it = stats.per_entity.find(n);
            if (it != stats.per_entity.end()) it->second.first_is_explicit = true;
        }
    }
}

inline void compute_structure_stats(const EpisodeScript& script, EpisodeStats& stats) {
    const auto first = resolve_first_appearances(script);
    const int K = script.shot_count();
    stats.shot_count = K;
    stats.new_entities_by_shot_index.assign(static_cast<std::size_t>(K), 0);

    int chain = 0;
    for (const auto& shot : script.shots) {
        if (shot.cut) {
            ++stats.cut_count;
            if (chain > 0) stats.chain_lengths.push_back(chain);
            chain = 1;
        } else {
            ++chain;
        }
    }
    if (chain > 0) stats.chain_lengths.push_back(chain);

    auto crossers = [&](const ShotSpec& a, const ShotSpec& b) {
        // carry-over counts characters and objects only
        std::set<std::string> prev(a.characters.begin(), a.characters.end());
        prev.insert(a.objects.begin(), a.objects.end());
        for (const auto& n : b.characters)
            if (prev.contains(n)) return true;
        for (const auto& n : b.objects)
            if (prev.contains(n)) return true;
        return false;
    };

    for (int i = 1; i < K; ++i) {
        if (!script.shots[static_cast<std::size_t>(i)].cut) continue;
        ++stats.within_episode_cuts;
        if (crossers(script.shots[static_cast<std::size_t>(i - 1)],
                     script.shots[static_cast<std::size_t>(i)]))
            ++stats.carry_over_cuts;
    }

    for (const auto& shot : script.shots) {
        int news = 0;
        for (const auto& n : shot.all_scheduled())
            if (first.at(n) == shot.index) ++news;
        stats.new_entities_by_shot_index[static_cast<std::size_t>(shot.index - 1)] = news;
        if (news > 0)
            ++stats.registry_shots;
        else
            ++stats.memory_only_shots;
    }
}

inline EpisodeStats compute_stats(const EpisodeScript& script) {
    EpisodeStats stats;
    stats.episode_id = script.episode_id;
    stats.tier = script.tier;
    compute_entity_stats(script, stats);
    compute_structure_stats(script, stats);
    return stats;
}

// Dataset-level roll-up of per-episode stats, mirroring the descriptive tables
// the stats subcommand prints.
struct DatasetStats {
    long episodes = 0;
    long shots = 0;
    long scenes = 0;  // == chain count by construction
    long registry_count[3] = {0, 0, 0};
    long scheduled_appearances[3] = {0, 0, 0};
    long unique_scheduled[3] = {0, 0, 0};
    long reappearances[3] = {0, 0, 0};
    long recurring_entities[3] = {0, 0, 0};
    long cross_scene_recurring[3] = {0, 0, 0};

    std::vector<int> per_entity_max_gaps;     // recurring entities only
    std::vector<int> per_episode_max_gaps;    // max over entities, per episode
    std::vector<int> chain_lengths;
    long cut_count = 0;
    long within_episode_cuts = 0;
    long carry_over_cuts = 0;
    long memory_only_shots = 0;
    long registry_shots = 0;

    // average new entities per shot index: sum and contributing episode count
    std::vector<long> new_entity_sums;
    std::vector<long> new_entity_counts;

    // per-shot composition
    long shots_ge3_chars = 0;
    long shots_2c1o = 0;
    long shots_tri_type = 0;
    long char_slots = 0, obj_slots = 0, loc_slots = 0;

    long registry_total() const { return registry_count[0] + registry_count[1] + registry_count[2]; }
    long appearances_total() const {
        return scheduled_appearances[0] + scheduled_appearances[1] + scheduled_appearances[2];
    }
    long reappearances_total() const {
        return reappearances[0] + reappearances[1] + reappearances[2];
    }
    long unique_total() const {
        return unique_scheduled[0] + unique_scheduled[1] + unique_scheduled[2];
    }
};

inline void accumulate_dataset_stats(DatasetStats& ds, const EpisodeScript& script,
                                     const EpisodeStats& st) {
    ++ds.episodes;
    ds.shots += st.shot_count;
    ds.scenes += static_cast<long>(st.chain_lengths.size());
    for (int t = 0; t < 3; ++t) {
        ds.registry_count[t] += st.registry_count[t];
        ds.scheduled_appearances[t] += st.scheduled_appearances[t];
        ds.unique_scheduled[t] += st.unique_scheduled[t];
        ds.reappearances[t] += st.reappearances[t];
        ds.recurring_entities[t] += st.recurring_entities[t];
        ds.cross_scene_recurring[t] += st.cross_scene_recurring[t];
    }
    int episode_max = -1;
    for (const auto& [name, es] : st.per_entity)
        if (es.max_intervening_gap) {
            ds.per_entity_max_gaps.push_back(*es.max_intervening_gap);
            episode_max = std::max(episode_max, *es.max_intervening_gap);
        }
    if (episode_max >= 0) ds.per_episode_max_gaps.push_back(episode_max);

    ds.chain_lengths.insert(ds.chain_lengths.end(), st.chain_lengths.begin(),
                            st.chain_lengths.end());
    ds.cut_count += st.cut_count;
    ds.within_episode_cuts += st.within_episode_cuts;
    ds.carry_over_cuts += st.carry_over_cuts;
    ds.memory_only_shots += st.memory_only_shots;
    ds.registry_shots += st.registry_shots;

    if (ds.new_entity_sums.size() < st.new_entities_by_shot_index.size()) {
        ds.new_entity_sums.resize(st.new_entities_by_shot_index.size(), 0);
        ds.new_entity_counts.resize(st.new_entities_by_shot_index.size(), 0);
    }
    for (std::size_t i = 0; i < st.new_entities_by_shot_index.size(); ++i) {
        ds.new_entity_sums[i] += st.new_entities_by_shot_index[i];
        ++ds.new_entity_counts[i];
    }

    for (const auto& shot : script.shots) {
        const auto nc = shot.characters.size(), no = shot.objects.size(), nl = shot.locations.size();
        ds.char_slots += static_cast<long>(nc);
        ds.obj_slots += static_cast<long>(no);
        ds.loc_slots += static_cast<long>(nl);
        if (nc >= 3) ++ds.shots_ge3_chars;
        if (nc >= 2 && no >= 1) ++ds.shots_2c1o;
        if (nc >= 1 && no >= 1 && nl >= 1) ++ds.shots_tri_type;
    }
}

}  // namespace episcope
