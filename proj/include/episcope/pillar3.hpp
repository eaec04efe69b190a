#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "episcope/grounding.hpp"
#include "episcope/judge_adapter.hpp"
#include "episcope/metric_value.hpp"
#include "episcope/prompts.hpp"

namespace episcope {

inline std::string pairwise_key(const std::string& episode_id, const std::string& entity,
                                int anchor_shot, int cmp_shot) {
    return "pair|" + episode_id + "|" + entity + "|" + std::to_string(anchor_shot) + "|" +
           std::to_string(cmp_shot);
}
inline std::string scene_key(const std::string& episode_id, const std::string& location,
                             int anchor_shot, int cmp_shot) {
    return "scene|" + episode_id + "|" + location + "|" + std::to_string(anchor_shot) + "|" +
           std::to_string(cmp_shot);
}

// One gate-admitted appearance of an entity.
struct PoolAppearance {
    int shot_index = 0;
    std::shared_ptr<const GroundedAppearance> app;
    std::optional<double> fidelity;  // nullopt: admitted via the None bypass
    std::optional<std::vector<double>> embedding;
    bool embedding_failed = false;
    std::optional<double> centroid_sim;
};

struct PoolDiagnostics {
    double mean_sim = 0.0;
    double min_sim = 0.0;
    double max_sim = 0.0;
    double pairwise_median = 0.0;
    int worst_shot = 0;           // appearance farthest from the centroid
    int representative_shot = 0;  // the anchor
};

// Gate-admitted appearances of one entity plus the embedding-space summary.
struct CrossShotPool {
    std::string entity;
    EntityType type = EntityType::character;
    std::string description;
    std::vector<PoolAppearance> appearances;  // ordered by shot index
    std::vector<double> centroid;             // unit norm; empty until computed
    std::optional<std::size_t> anchor;        // index into appearances
    std::optional<PoolDiagnostics> diagnostics;

    long present_count = 0;  // universe: present-status appearances of this entity
    long gate_skipped = 0;   // present but fidelity below the gate
    long none_bypass = 0;    // admitted with fidelity=None (logged for audit)

    long admitted() const { return static_cast<long>(appearances.size()); }
    long embedded() const {
        return static_cast<long>(std::count_if(appearances.begin(), appearances.end(),
                                               [](const PoolAppearance& a) {
                                                   return a.embedding.has_value();
                                               }));
    }
};

struct GateCandidate {
    std::shared_ptr<const GroundedAppearance> app;
    std::optional<double> fidelity;  // nullopt when the fidelity judge failed
};

struct GateMeta {
    long present_total = 0;
    long admitted = 0;
    long gate_skipped = 0;
    long none_bypass = 0;
};

// Admission rule for the cross-shot pool: status must be present AND the
// Pillar-2 fidelity must clear tau_fid, except that an unjudgeable appearance
// (fidelity=None) is admitted by default rather than silently dropped.
// Weak and absent appearances never enter. One pool is emitted per entity
// that has at least one present appearance.
inline std::map<std::string, CrossShotPool> fidelity_gate(
    const std::map<std::string, std::vector<GateCandidate>>& candidates_by_entity,
    const std::map<std::string, const Entity*>& registry, const EvalConfig& cfg, GateMeta* meta) {
    std::map<std::string, CrossShotPool> pools;
    for (const auto& [name, candidates] : candidates_by_entity) {
        CrossShotPool pool;
        pool.entity = name;
        const auto rit = registry.find(name);
        if (rit != registry.end()) {
            pool.type = rit->second->type;
            pool.description = rit->second->description;
        }
        for (const auto& cand : candidates) {
            if (!cand.app || cand.app->status != PresenceStatus::present) continue;
            ++pool.present_count;
            const bool bypass = !cand.fidelity.has_value();
            if (!bypass && *cand.fidelity < cfg.tau_fid) {
                ++pool.gate_skipped;
                continue;
            }
            if (bypass) ++pool.none_bypass;
            PoolAppearance pa;
            pa.shot_index = cand.app->shot.shot_index;
            pa.app = cand.app;
            pa.fidelity = cand.fidelity;
            pool.appearances.push_back(std::move(pa));
        }
        std::sort(pool.appearances.begin(), pool.appearances.end(),
                  [](const PoolAppearance& a, const PoolAppearance& b) {
                      return a.shot_index < b.shot_index;
                  });
        if (meta) {
            meta->present_total += pool.present_count;
            meta->admitted += pool.admitted();
            meta->gate_skipped += pool.gate_skipped;
            meta->none_bypass += pool.none_bypass;
        }
        if (pool.present_count > 0) pools.emplace(name, std::move(pool));
    }
    return pools;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Embeds every admitted appearance, computes the unit-norm centroid of the
// embeddings, per-appearance centroid similarities, the centroid-
// representative anchor (argmax similarity, earlier shot on ties) and the
// audit diagnostics. Pools with fewer than two embedded appearances stay
// without centroid/anchor.
inline void centroid_similarities(CrossShotPool& pool, EmbeddingBackend& embed) {
    for (auto& pa : pool.appearances) {
        if (pa.embedding || pa.embedding_failed) continue;
        if (!pa.app->crop) {
            pa.embedding_failed = true;
            continue;
        }
        auto e = embed.embed(*pa.app->crop);
        if (e)
            pa.embedding = e.take();
        else
            pa.embedding_failed = true;
    }
    std::vector<std::size_t> embedded;
    for (std::size_t i = 0; i < pool.appearances.size(); ++i)
        if (pool.appearances[i].embedding) embedded.push_back(i);
    if (embedded.size() < 2) return;

    const std::size_t dim = pool.appearances[embedded[0]].embedding->size();
    std::vector<double> mean(dim, 0.0);
    for (std::size_t idx : embedded)
        for (std::size_t d = 0; d < dim; ++d) mean[d] += (*pool.appearances[idx].embedding)[d];
    double norm = 0.0;
    for (double v : mean) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return;  // degenerate (cancelling embeddings); pool unusable
    for (auto& v : mean) v /= norm;
    pool.centroid = std::move(mean);

    PoolDiagnostics diag;
    double sum = 0.0;
    std::optional<std::size_t> best, worst;
    for (std::size_t idx : embedded) {
        auto& pa = pool.appearances[idx];
        pa.centroid_sim = dot(*pa.embedding, pool.centroid);
        sum += *pa.centroid_sim;
        if (!best || *pa.centroid_sim > *pool.appearances[*best].centroid_sim) best = idx;
        if (!worst || *pa.centroid_sim < *pool.appearances[*worst].centroid_sim) worst = idx;
    }
    pool.anchor = best;
    diag.mean_sim = sum / static_cast<double>(embedded.size());
    diag.min_sim = *pool.appearances[*worst].centroid_sim;
    diag.max_sim = *pool.appearances[*best].centroid_sim;
    diag.worst_shot = pool.appearances[*worst].shot_index;
    diag.representative_shot = pool.appearances[*best].shot_index;

    std::vector<double> pair_sims;
    for (std::size_t i = 0; i < embedded.size(); ++i)
        for (std::size_t j = i + 1; j < embedded.size(); ++j)
            pair_sims.push_back(dot(*pool.appearances[embedded[i]].embedding,
                                    *pool.appearances[embedded[j]].embedding));
    std::sort(pair_sims.begin(), pair_sims.end());
    const std::size_t n = pair_sims.size();
    diag.pairwise_median =
        n % 2 ? pair_sims[n / 2] : 0.5 * (pair_sims[n / 2 - 1] + pair_sims[n / 2]);
    pool.diagnostics = diag;
}

// Episode-level cs metric for one entity type: the mean over the union of all
// per-appearance centroid similarities, so an entity appearing N times
// contributes N samples. Counts are at appearance granularity against the
// present-status universe.
inline MetricValue pooled_embedding_metric(const std::map<std::string, CrossShotPool>& pools,
                                           EntityType type) {
    MetricValue out;
    double sum = 0.0;
    for (const auto& [name, pool] : pools) {
        if (pool.type != type) continue;
        out.n_skipped += pool.gate_skipped;
        const bool usable = !pool.centroid.empty();
        for (const auto& pa : pool.appearances) {
            if (pa.embedding_failed) {
                ++out.n_failed;
            } else if (usable && pa.centroid_sim) {
                sum += *pa.centroid_sim;
                ++out.n_eval;
            } else {
                ++out.n_skipped;  // singleton pool or degraded below pairing
            }
        }
    }
    if (out.n_eval > 0) out.value = sum / static_cast<double>(out.n_eval);
    return out;
}

// Boundary similarity for continuation pairs: embedding dot of (last frame of
// shot k, first frame of shot k+1) wherever cut(k+1) = false. Hard cuts are
// not instances at all.
inline MetricValue transition_boundary(
    const std::vector<const ShotSpec*>& shots,
    const std::function<const VideoSource*(int shot_index)>& frames, EmbeddingBackend& embed) {
    std::vector<MetricValue> rows;
    for (std::size_t i = 0; i + 1 < shots.size(); ++i) {
        if (shots[i + 1]->cut) continue;
        const VideoSource* a = frames(shots[i]->index);
        const VideoSource* b = frames(shots[i + 1]->index);
        if (!a || !b) {
            rows.push_back(MetricValue::failed(1));
            continue;
        }
        auto ea = embed.embed(a->frame(a->frame_count()));
        auto eb = embed.embed(b->frame(1));
        if (!ea || !eb) {
            rows.push_back(MetricValue::failed(1));
            continue;
        }
        rows.push_back(MetricValue::of(dot(ea.value(), eb.value())));
    }
    return combine_rows(rows);
}

// ---------------------------------------------------------------------------
// LLM pairwise judging (characters and objects)

struct PairRecord {
    std::string entity;
    EntityType type = EntityType::character;
    int anchor_shot = 0;
    int cmp_shot = 0;
    Fallible<PairwiseJudgment> verdict = Fallible<PairwiseJudgment>::fail("not judged");
};

// Anchor-vs-each judging over one pool. Requires a selected anchor.
inline std::vector<PairRecord> judge_pool_pairs(const std::string& episode_id,
                                                const CrossShotPool& pool, JudgeBackend& judge,
                                                const EvalConfig& cfg,
                                                const JudgeAuditFn& audit = nullptr) {
    std::vector<PairRecord> out;
    if (!pool.anchor) return out;
    const auto& anchor = pool.appearances[*pool.anchor];
    for (std::size_t i = 0; i < pool.appearances.size(); ++i) {
        if (i == *pool.anchor) continue;
        const auto& cmp = pool.appearances[i];
        PairRecord rec;
        rec.entity = pool.entity;
        rec.type = pool.type;
        rec.anchor_shot = anchor.shot_index;
        rec.cmp_shot = cmp.shot_index;
        if (!anchor.app->crop || !cmp.app->crop) {
            rec.verdict = Fallible<PairwiseJudgment>::fail("missing crop");
            out.push_back(std::move(rec));
            continue;
        }
        JudgeRequest req;
        req.kind = JudgeKind::pairwise;
        req.key = pairwise_key(episode_id, pool.entity, anchor.shot_index, cmp.shot_index);
        req.images = {*anchor.app->crop, *cmp.app->crop};
        req.prompt = prompts::pairwise(pool.description, pool.type);
        req.payload = {{"entity", pool.entity},
                       {"type", to_string(pool.type)},
                       {"criteria", criteria_for(pool.type)}};
        rec.verdict = call_judge<PairwiseJudgment>(
            judge, req,
            [&](const std::string& raw) { return parse_pairwise_verdict(raw, pool.type); }, cfg,
            audit);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::string llm_metric_prefix(EntityType t) {
    switch (t) {
        case EntityType::character: return "llm_face";
        case EntityType::object: return "llm_object";
        default: return "llm_scene";
    }
}

// The 6 per-type rows over all (anchor, comparison) pairs of the episode:
// accuracy = mean(same), mean_score = mean(similarity), plus 4 criteria means
// with per-criterion None-skip. The pair universe counts one pair per
// non-anchor present appearance of every entity with >= 2 present
// appearances; pairs lost to the gate are skipped, pairs lost to judge or
// embedding failures are failed.
inline std::map<std::string, MetricValue> pairwise_llm_metrics(
    const std::map<std::string, CrossShotPool>& pools, const std::vector<PairRecord>& records,
    EntityType type) {
    const std::string prefix = llm_metric_prefix(type);
    const auto& crits = criteria_for(type);

    long universe = 0, done = 0, judge_failed = 0, infra_failed = 0;
    for (const auto& [name, pool] : pools) {
        if (pool.type != type) continue;
        if (pool.present_count >= 2) universe += pool.present_count - 1;
        if (pool.admitted() >= 2 && !pool.anchor)
            infra_failed += pool.admitted() - 1;  // unusable pool: embeddings degraded
    }

    double same_sum = 0.0, sim_sum = 0.0;
    std::map<std::string, std::pair<double, long>> crit_acc;  // sum, count
    std::map<std::string, long> crit_none_per;
    for (const auto& rec : records) {
        if (rec.type != type) continue;
        if (!rec.verdict) {
            ++judge_failed;
            continue;
        }
        ++done;
        const auto& v = rec.verdict.value();
        same_sum += v.same;
        sim_sum += v.similarity;
        for (const auto& c : crits) {
            const auto it = v.criteria.find(c);
            if (it != v.criteria.end() && it->second) {
                crit_acc[c].first += *it->second;
                ++crit_acc[c].second;
            } else {
                ++crit_none_per[c];
            }
        }
    }

    const long skipped = std::max(0L, universe - done - judge_failed - infra_failed);
    const long failed = judge_failed + infra_failed;

    std::map<std::string, MetricValue> out;
    MetricValue acc{std::nullopt, done, failed, skipped};
    if (done > 0) acc.value = same_sum / static_cast<double>(done);
    MetricValue mean_score = acc;
    if (done > 0) mean_score.value = sim_sum / static_cast<double>(done);
    out[prefix + "_accuracy"] = acc;
    out[prefix + "_mean_score"] = mean_score;
    for (const auto& c : crits) {
        const auto [sum, n] = crit_acc[c];
        MetricValue mv{std::nullopt, n, failed, skipped + crit_none_per[c]};
        if (n > 0) mv.value = sum / static_cast<double>(n);
        out[prefix + "_" + c] = mv;
    }
    return out;
}

// ---------------------------------------------------------------------------
// LLM scene judging (locations, camera-invariant, full frames)

struct SceneComparison {
    int cmp_shot = 0;
    Fallible<PairwiseJudgment> verdict = Fallible<PairwiseJudgment>::fail("not judged");
};

struct LocationResult {
    std::string location;
    int anchor_shot = 0;
    std::vector<SceneComparison> comparisons;
    long capped_out = 0;  // comparisons dropped by the n_shots_loc_set cap
};

// Judges one location pool pairwise: for each non-anchor shot, up to
// n_frames_per_set sharpest full frames from the anchor shot and the
// comparison shot (at most 4 images per call). Comparison shots beyond
// n_shots_loc_set - 1 are dropped in shot order and logged.
inline LocationResult judge_scene_location(
    const std::string& episode_id, const CrossShotPool& pool,
    const std::function<const VideoSource*(int shot_index)>& frames, JudgeBackend& judge,
    const EvalConfig& cfg, const JudgeAuditFn& audit = nullptr) {
    LocationResult out;
    out.location = pool.entity;
    if (!pool.anchor) return out;
    const auto& anchor = pool.appearances[*pool.anchor];
    out.anchor_shot = anchor.shot_index;

    auto sharpest = [&](int shot_index) {
        std::vector<Image> imgs;
        const VideoSource* src = frames(shot_index);
        if (!src) return imgs;
        auto ranked = sharpness_ranked_indices(*src);
        const int take = std::min<int>(cfg.n_frames_per_set, static_cast<int>(ranked.size()));
        for (int i = 0; i < take; ++i) imgs.push_back(src->frame(ranked[static_cast<std::size_t>(i)]));
        return imgs;
    };
    const auto anchor_frames = sharpest(anchor.shot_index);

    int used = 0;
    for (std::size_t i = 0; i < pool.appearances.size(); ++i) {
        if (i == *pool.anchor) continue;
        if (used >= cfg.n_shots_loc_set - 1) {
            ++out.capped_out;
            continue;
        }
        ++used;
        const auto& cmp = pool.appearances[i];
        SceneComparison sc;
        sc.cmp_shot = cmp.shot_index;
        const auto cmp_frames = sharpest(cmp.shot_index);
        if (anchor_frames.empty() || cmp_frames.empty()) {
            sc.verdict = Fallible<PairwiseJudgment>::fail("frames unavailable");
            out.comparisons.push_back(std::move(sc));
            continue;
        }
        JudgeRequest req;
        req.kind = JudgeKind::scene;
        req.key = scene_key(episode_id, pool.entity, anchor.shot_index, cmp.shot_index);
        req.images = anchor_frames;
        req.images.insert(req.images.end(), cmp_frames.begin(), cmp_frames.end());
        req.prompt = prompts::scene(pool.description);
        req.payload = {{"entity", pool.entity},
                       {"type", "location"},
                       {"criteria", criteria_for(EntityType::location)}};
        sc.verdict = call_judge<PairwiseJudgment>(
            judge, req,
            [&](const std::string& raw) {
                return parse_pairwise_verdict(raw, EntityType::location);
            },
            cfg, audit);
        out.comparisons.push_back(std::move(sc));
    }
    return out;
}

// The 6 scene rows. Instances are locations: a location is evaluated when at
// least one pairwise comparison succeeded (allcons = product of same
// verdicts, cons = mean similarity); failed when judging was attempted and
// every comparison failed; skipped when the gate or a singleton pool left
// fewer than two appearances.
inline std::map<std::string, MetricValue> scene_llm_metrics(
    const std::map<std::string, CrossShotPool>& pools,
    const std::vector<LocationResult>& results) {
    const auto& crits = criteria_for(EntityType::location);
    std::map<std::string, const LocationResult*> by_name;
    for (const auto& r : results) by_name[r.location] = &r;

    std::vector<Sample> allcons_rows, cons_rows;
    std::map<std::string, std::vector<Sample>> crit_rows;
    for (const auto& [name, pool] : pools) {
        if (pool.type != EntityType::location) continue;
        if (pool.present_count < 1) continue;
        const auto it = by_name.find(name);
        const LocationResult* res =
            it != by_name.end() && !it->second->comparisons.empty() ? it->second : nullptr;
        if (pool.admitted() < 2) {
            allcons_rows.push_back(Sample::skip());
            cons_rows.push_back(Sample::skip());
            for (const auto& c : crits) crit_rows[c].push_back(Sample::skip());
            continue;
        }
        if (!res || !pool.anchor) {
            allcons_rows.push_back(Sample::fail());
            cons_rows.push_back(Sample::fail());
            for (const auto& c : crits) crit_rows[c].push_back(Sample::fail());
            continue;
        }
        int ok = 0;
        double allcons = 1.0, sim_sum = 0.0;
        std::map<std::string, std::pair<double, long>> crit_acc;
        for (const auto& sc : res->comparisons) {
            if (!sc.verdict) continue;
            ++ok;
            allcons *= sc.verdict.value().same;
            sim_sum += sc.verdict.value().similarity;
            for (const auto& c : crits) {
                const auto cit = sc.verdict.value().criteria.find(c);
                if (cit != sc.verdict.value().criteria.end() && cit->second) {
                    crit_acc[c].first += *cit->second;
                    ++crit_acc[c].second;
                }
            }
        }
        if (ok == 0) {
            allcons_rows.push_back(Sample::fail());
            cons_rows.push_back(Sample::fail());
            for (const auto& c : crits) crit_rows[c].push_back(Sample::fail());
            continue;
        }
        allcons_rows.push_back(Sample::of(allcons));
        cons_rows.push_back(Sample::of(sim_sum / ok));
        for (const auto& c : crits) {
            const auto [sum, n] = crit_acc[c];
            crit_rows[c].push_back(n > 0 ? Sample::of(sum / static_cast<double>(n))
                                         : Sample::skip());
        }
    }

    std::map<std::string, MetricValue> out;
    out["llm_scene_accuracy"] = none_skip_mean(allcons_rows);
    out["llm_scene_mean_score"] = none_skip_mean(cons_rows);
    for (const auto& c : crits) out["llm_scene_" + c] = none_skip_mean(crit_rows[c]);
    return out;
}

// ---------------------------------------------------------------------------
// Gap-decay diagnostic

struct GapRecord {
    EntityType type = EntityType::character;
    int gap = 0;     // |k_j - k_i|, shot-index distance (>= 1)
    double sim = 0;  // raw pairwise embedding dot between the two appearances
};

// One record per unordered pair of admitted appearances (i < j in shot
// order), for every entity with an evaluable pool. Pairs with a failed
// embedding are dropped and counted.
inline std::vector<GapRecord> gap_decay_dataset(const std::map<std::string, CrossShotPool>& pools,
                                                long* dropped = nullptr) {
    std::vector<GapRecord> out;
    for (const auto& [name, pool] : pools) {
        if (pool.admitted() < 2) continue;
        for (std::size_t i = 0; i < pool.appearances.size(); ++i) {
            for (std::size_t j = i + 1; j < pool.appearances.size(); ++j) {
                const auto& a = pool.appearances[i];
                const auto& b = pool.appearances[j];
                if (!a.embedding || !b.embedding) {
                    if (dropped) ++*dropped;
                    continue;
                }
                GapRecord rec;
                rec.type = pool.type;
                rec.gap = std::abs(b.shot_index - a.shot_index);
                rec.sim = dot(*a.embedding, *b.embedding);
                out.push_back(rec);
            }
        }
    }
    return out;
}

}  // namespace episcope
