#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "episcope/backends.hpp"
#include "episcope/eval_config.hpp"
#include "episcope/prompts.hpp"

namespace episcope {

// Normalization boundary for the multimodal judge: everything downstream of
// the functions in this header sees scores in [0, 1] (raw 1-10 divided by 10)
// and binary verdicts as {0, 1}. An unparseable or schema-violating verdict
// is re-asked once, then becomes a typed failure; raw text never leaks past
// the adapter.

struct FidelityJudgment {
    double overall = 0.0;                    // [0, 1]
    std::map<std::string, double> criteria;  // exactly the type's 4 criteria
    bool low_confidence = false;             // true for weak-status crops
};

struct ActionJudgment {
    double overall = 0.0;
    int depicted = 0;  // binary
    double subject_identity = 0.0;
    double subject_action = 0.0;
    std::optional<double> object_interaction;  // judge-declared None allowed
    double motion_quality = 0.0;
};

struct PairwiseJudgment {
    int same = 0;  // binary
    double similarity = 0.0;
    std::map<std::string, std::optional<double>> criteria;  // per-criterion, None-skippable
};

namespace judge_detail {

inline bool score_1_10(const nlohmann::json& j, double& out) {
    if (!j.is_number()) return false;
    const double v = j.get<double>();
    if (v < 1.0 || v > 10.0) return false;
    out = v / 10.0;
    return true;
}

inline bool parse_criteria(const nlohmann::json& j, EntityType type, bool allow_null,
                           std::map<std::string, std::optional<double>>& out) {
    if (!j.is_object()) return false;
    const auto& expected = criteria_for(type);
    if (j.size() != expected.size()) return false;
    for (const auto& name : expected) {
        if (!j.contains(name)) return false;
        if (j[name].is_null()) {
            if (!allow_null) return false;
            out[name] = std::nullopt;
            continue;
        }
        double v;
        if (!score_1_10(j[name], v)) return false;
        out[name] = v;
    }
    return true;
}

}  // namespace judge_detail

inline Fallible<FidelityJudgment> parse_fidelity_verdict(const std::string& raw, EntityType type) {
    nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded()) return Fallible<FidelityJudgment>::fail("verdict is not JSON");
    FidelityJudgment out;
    if (!j.contains("overall") || !judge_detail::score_1_10(j["overall"], out.overall))
        return Fallible<FidelityJudgment>::fail("fidelity verdict: bad 'overall'");
    std::map<std::string, std::optional<double>> crit;
    if (!j.contains("criteria") ||
        !judge_detail::parse_criteria(j["criteria"], type, /*allow_null=*/false, crit))
        return Fallible<FidelityJudgment>::fail("fidelity verdict: bad 'criteria'");
    for (auto& [k, v] : crit) out.criteria[k] = *v;
    return Fallible<FidelityJudgment>::ok(std::move(out));
}

inline Fallible<ActionJudgment> parse_action_verdict(const std::string& raw) {
    nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded()) return Fallible<ActionJudgment>::fail("verdict is not JSON");
    ActionJudgment out;
    if (!j.contains("overall") || !judge_detail::score_1_10(j["overall"], out.overall))
        return Fallible<ActionJudgment>::fail("action verdict: bad 'overall'");
    if (!j.contains("depicted") || !j["depicted"].is_boolean())
        return Fallible<ActionJudgment>::fail("action verdict: bad 'depicted'");
    out.depicted = j["depicted"].get<bool>() ? 1 : 0;
    if (!j.contains("subject_identity") ||
        !judge_detail::score_1_10(j["subject_identity"], out.subject_identity))
        return Fallible<ActionJudgment>::fail("action verdict: bad 'subject_identity'");
    if (!j.contains("subject_action") ||
        !judge_detail::score_1_10(j["subject_action"], out.subject_action))
        return Fallible<ActionJudgment>::fail("action verdict: bad 'subject_action'");
    if (!j.contains("object_interaction"))
        return Fallible<ActionJudgment>::fail("action verdict: missing 'object_interaction'");
    if (!j["object_interaction"].is_null()) {
        double v;
        if (!judge_detail::score_1_10(j["object_interaction"], v))
            return Fallible<ActionJudgment>::fail("action verdict: bad 'object_interaction'");
        out.object_interaction = v;
    }
    if (!j.contains("motion_quality") ||
        !judge_detail::score_1_10(j["motion_quality"], out.motion_quality))
        return Fallible<ActionJudgment>::fail("action verdict: bad 'motion_quality'");
    return Fallible<ActionJudgment>::ok(std::move(out));
}

inline Fallible<PairwiseJudgment> parse_pairwise_verdict(const std::string& raw, EntityType type) {
    nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded()) return Fallible<PairwiseJudgment>::fail("verdict is not JSON");
    PairwiseJudgment out;
    if (!j.contains("same") || !j["same"].is_boolean())
        return Fallible<PairwiseJudgment>::fail("pairwise verdict: bad 'same'");
    out.same = j["same"].get<bool>() ? 1 : 0;
    if (!j.contains("similarity") || !judge_detail::score_1_10(j["similarity"], out.similarity))
        return Fallible<PairwiseJudgment>::fail("pairwise verdict: bad 'similarity'");
    if (!j.contains("criteria") ||
        !judge_detail::parse_criteria(j["criteria"], type, /*allow_null=*/true, out.criteria))
        return Fallible<PairwiseJudgment>::fail("pairwise verdict: bad 'criteria'");
    return Fallible<PairwiseJudgment>::ok(std::move(out));
}

// Hook for the audit log; called once per judge round trip with the raw body.
using JudgeAuditFn =
    std::function<void(const JudgeRequest&, const std::string& response, bool parse_ok)>;

// Calls the judge and parses the verdict, re-asking on parse failure up to
// cfg.judge_parse_retries times. Transport failures are not re-asked here
// (the transport client owns its retry budget).
template <typename T, typename Parser>
Fallible<T> call_judge(JudgeBackend& judge, const JudgeRequest& request, Parser parse,
                       const EvalConfig& cfg, const JudgeAuditFn& audit = nullptr) {
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.judge_parse_retries; ++attempt) {
        auto raw = judge.judge(request);
        if (!raw) {
            if (audit) audit(request, "<transport failure: " + raw.error() + ">", false);
            return Fallible<T>::fail(raw.error());
        }
        auto parsed = parse(raw.value());
        if (audit) audit(request, raw.value(), parsed.has_value());
        if (parsed) return parsed;
        last_error = parsed.error();
    }
    return Fallible<T>::fail("unparseable verdict after re-ask: " + last_error);
}

}  // namespace episcope
