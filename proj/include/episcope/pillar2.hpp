#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "episcope/grounding.hpp"
#include "episcope/judge_adapter.hpp"
#include "episcope/metric_value.hpp"
#include "episcope/pillar1.hpp"
#include "episcope/prompts.hpp"

namespace episcope {

// Canonical judge-request keys; the audit log and the scriptable fakes key on
// these, so the format is a contract.
inline std::string fidelity_key(const ShotKey& shot, const std::string& entity) {
    return "fid|" + shot.episode_id + "|" + std::to_string(shot.shot_index) + "|" + entity;
}
inline std::string action_key(const ShotKey& shot) {
    return "act|" + shot.episode_id + "|" + std::to_string(shot.shot_index);
}

// Scores one canonical crop against the registry description on the type's
// criteria. Pre: status is present or weak (absent pairs are never judged).
inline Fallible<FidelityJudgment> judge_entity_fidelity(const GroundedAppearance& appearance,
                                                        const Entity& entity, JudgeBackend& judge,
                                                        const EvalConfig& cfg,
                                                        const JudgeAuditFn& audit = nullptr) {
    if (appearance.status == PresenceStatus::absent || !appearance.crop)
        return Fallible<FidelityJudgment>::fail("fidelity judging requires a crop");
    const bool weak = appearance.status == PresenceStatus::weak;
    JudgeRequest req;
    req.kind = JudgeKind::fidelity;
    req.key = fidelity_key(appearance.shot, entity.name);
    req.images = {*appearance.crop};
    req.prompt = prompts::fidelity(entity.description, entity.type, weak);
    req.payload = {{"entity", entity.name},
                   {"type", to_string(entity.type)},
                   {"status", to_string(appearance.status)},
                   {"criteria", criteria_for(entity.type)}};
    auto parsed = call_judge<FidelityJudgment>(
        judge, req,
        [&](const std::string& raw) { return parse_fidelity_verdict(raw, entity.type); }, cfg,
        audit);
    if (parsed) parsed.value().low_confidence = weak;
    return parsed;
}

// Minimal view of a built grid so this header does not pull in the drawing
// code (and its OpenCV dependency).
struct ActionGridView {
    const Image* image = nullptr;
    std::string legend_text;
};

inline Fallible<ActionJudgment> judge_action(const ActionGridView& grid, const ShotKey& shot,
                                             const std::string& action_text,
                                             const std::vector<std::string>& object_names,
                                             JudgeBackend& judge, const EvalConfig& cfg,
                                             const JudgeAuditFn& audit = nullptr) {
    JudgeRequest req;
    req.kind = JudgeKind::action;
    req.key = action_key(shot);
    if (grid.image) req.images = {*grid.image};
    req.prompt = prompts::action(action_text, grid.legend_text);
    req.payload = {{"action_text", action_text}, {"object_names", object_names}};
    return call_judge<ActionJudgment>(
        judge, req, [](const std::string& raw) { return parse_action_verdict(raw); }, cfg, audit);
}

// ---------------------------------------------------------------------------
// Episode-level aggregation

// Outcome of the grounding+fidelity stage for one scheduled (shot, entity).
struct ShotEntityRecord {
    EntityType type = EntityType::character;
    bool grounding_failed = false;
    PresenceStatus status = PresenceStatus::absent;
    bool judged = false;        // fidelity verdict obtained
    bool judge_failed = false;  // judging attempted, failed after re-ask
    FidelityJudgment fidelity;  // valid iff judged
};

struct ShotP2Record {
    int shot_index = 0;
    std::array<std::vector<std::string>, 3> scheduled;  // names by type
    std::map<std::string, ShotEntityRecord> entities;
    std::array<MetricValue, 3> presence;  // per-type per-shot presence rows
    Fallible<ActionJudgment> action = Fallible<ActionJudgment>::fail("not evaluated");
};

inline std::string fidelity_metric_prefix(EntityType t) {
    switch (t) {
        case EntityType::character: return "intra_face";
        case EntityType::object: return "intra_object";
        default: return "intra_location";
    }
}

inline const char* presence_metric_name(EntityType t) {
    switch (t) {
        case EntityType::character: return "intra_character_presence";
        case EntityType::object: return "intra_object_presence";
        default: return "intra_location_presence";
    }
}

// Produces the 24 Pillar-2 rows for one episode: 3 presence + 15 fidelity
// (overall + 4 criteria per type) + 6 action metrics. Fidelity values use the
// two-stage mean (per-shot mean over the type's judged entities, then mean
// over shots); counts are kept at (shot, entity) granularity.
inline std::map<std::string, MetricValue> aggregate_pillar2(
    const std::vector<ShotP2Record>& shots) {
    std::map<std::string, MetricValue> out;

    for (int t = 0; t < 3; ++t) {
        const auto type = static_cast<EntityType>(t);
        std::vector<MetricValue> presence_rows;
        for (const auto& s : shots) presence_rows.push_back(s.presence[static_cast<std::size_t>(t)]);
        out[presence_metric_name(type)] = combine_rows(presence_rows);

        const std::string prefix = fidelity_metric_prefix(type);
        const auto& crits = criteria_for(type);

        // two-stage values
        std::vector<Sample> shot_overall;
        std::map<std::string, std::vector<Sample>> shot_crit;
        // instance-level counts, shared by the overall and criteria rows
        long n_eval = 0, n_failed = 0, n_skipped = 0;

        for (const auto& s : shots) {
            double sum = 0.0;
            int judged = 0;
            std::map<std::string, double> crit_sum;
            for (const auto& name : s.scheduled[static_cast<std::size_t>(t)]) {
                const auto it = s.entities.find(name);
                if (it == s.entities.end()) continue;
                const auto& rec = it->second;
                if (rec.grounding_failed || rec.judge_failed) {
                    ++n_failed;
                    continue;
                }
                if (rec.status == PresenceStatus::absent) {
                    ++n_skipped;
                    continue;
                }
                if (!rec.judged) continue;  // defensive; judged pairs only
                ++n_eval;
                ++judged;
                sum += rec.fidelity.overall;
                for (const auto& [k, v] : rec.fidelity.criteria) crit_sum[k] += v;
            }
            if (judged > 0) {
                shot_overall.push_back(Sample::of(sum / judged));
                for (const auto& c : crits)
                    shot_crit[c].push_back(Sample::of(crit_sum[c] / judged));
            } else {
                shot_overall.push_back(Sample::skip());
                for (const auto& c : crits) shot_crit[c].push_back(Sample::skip());
            }
        }

        auto finish = [&](std::vector<Sample>& samples) {
            MetricValue mv = none_skip_mean(samples);
            mv.n_eval = n_eval;
            mv.n_failed = n_failed;
            mv.n_skipped = n_skipped;
            if (mv.n_eval == 0) mv.value.reset();
            return mv;
        };
        out[prefix + "_fidelity"] = finish(shot_overall);
        for (const auto& c : crits) out[prefix + "_" + c] = finish(shot_crit[c]);
    }

    // action metrics: instances are shots
    std::vector<MetricValue> ovr, dep, ai, aa, ao, am;
    for (const auto& s : shots) {
        if (!s.action) {
            for (auto* rows : {&ovr, &dep, &ai, &aa, &ao, &am}) rows->push_back(MetricValue::failed(1));
            continue;
        }
        const auto& a = s.action.value();
        ovr.push_back(MetricValue::of(a.overall));
        dep.push_back(MetricValue::of(a.depicted));
        ai.push_back(MetricValue::of(a.subject_identity));
        aa.push_back(MetricValue::of(a.subject_action));
        ao.push_back(a.object_interaction ? MetricValue::of(*a.object_interaction)
                                          : MetricValue::skipped(1));
        am.push_back(MetricValue::of(a.motion_quality));
    }
    out["intra_action_overall"] = combine_rows(ovr);
    out["intra_action_depicted"] = combine_rows(dep);
    out["intra_action_subject_identity"] = combine_rows(ai);
    out["intra_action_subject_action"] = combine_rows(aa);
    out["intra_action_object_interaction"] = combine_rows(ao);
    out["intra_action_motion_quality"] = combine_rows(am);
    return out;
}

}  // namespace episcope
