#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "episcope/backends.hpp"
#include "episcope/common.hpp"

namespace episcope {

// Deterministic offline backends. Every fake draws from a seeded table:
// explicit scripted entries win, otherwise the value is synthesized from
// (seed, image fingerprint / request key) with a fixed RNG, so identical
// seeds and inputs reproduce identical behavior forever. Scripted failures
// exercise the n_failed paths.
//
// The synthesis rules below are a documented contract: oracle-style tests
// recompute metric values by querying these same tables.

namespace fake_detail {

inline std::uint64_t role_seed(std::uint64_t seed, const char* role) {
    return hash_mix(seed, fnv1a64(role));
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Box-Muller; determinism within a build is all the fakes promise across
// platforms, and that is what the reproducibility contract requires.
inline double gaussian(SplitMix64& rng) {
    double u1 = rng.next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace fake_detail

class FakeGroundingBackend : public GroundingBackend {
public:
    explicit FakeGroundingBackend(std::uint64_t seed)
        : seed_(fake_detail::role_seed(seed, "grounding")) {}

    void script(std::uint64_t image_fp, const std::string& query, std::vector<Detection> dets) {
        scripted_[{image_fp, query}] = std::move(dets);
    }
    void script_failure(std::uint64_t image_fp, const std::string& query) {
        failures_.insert({image_fp, query});
    }

    Fallible<std::vector<Detection>> detect(const Image& image,
                                            const std::string& query) override {
        const std::uint64_t fp = fingerprint(image);
        if (failures_.contains({fp, query}))
            return Fallible<std::vector<Detection>>::fail("scripted grounding failure");
        if (auto it = scripted_.find({fp, query}); it != scripted_.end())
            return Fallible<std::vector<Detection>>::ok(it->second);

        SplitMix64 rng(hash_mix(hash_mix(seed_, fp), fnv1a64(query)));
        const double u = rng.next_double();
        const int count = u < 0.08 ? 0 : (u < 0.70 ? 1 : 2);
        std::vector<Detection> dets;
        for (int i = 0; i < count; ++i) {
            const double w = image.width, h = image.height;
            const double bw = rng.uniform(0.20, 0.50) * w;
            const double bh = rng.uniform(0.20, 0.50) * h;
            const double cx = rng.uniform(0.25, 0.75) * w;
            const double cy = rng.uniform(0.25, 0.75) * h;
            Box b;
            b.x1 = std::max(0.0, cx - bw / 2);
            b.y1 = std::max(0.0, cy - bh / 2);
            b.x2 = std::min(w, cx + bw / 2);
            b.y2 = std::min(h, cy + bh / 2);
            if (b.width() < 2.0) b.x2 = std::min(w, b.x1 + 2.0);
            if (b.height() < 2.0) b.y2 = std::min(h, b.y1 + 2.0);
            dets.push_back(Detection{b, rng.uniform(0.30, 0.98)});
        }
        return Fallible<std::vector<Detection>>::ok(std::move(dets));
    }
    std::string identity() const override { return "fake-grounding"; }

private:
    std::uint64_t seed_;
    std::map<std::pair<std::uint64_t, std::string>, std::vector<Detection>> scripted_;
    std::set<std::pair<std::uint64_t, std::string>> failures_;
};

class FakeEmbeddingBackend : public EmbeddingBackend {
public:
    explicit FakeEmbeddingBackend(std::uint64_t seed, int dim = 32)
        : seed_(fake_detail::role_seed(seed, "embedding")), dim_(dim) {}

    void script(std::uint64_t image_fp, std::vector<double> unit_vec) {
        scripted_[image_fp] = std::move(unit_vec);
    }
    void script_failure(std::uint64_t image_fp) { failures_.insert(image_fp); }

    Fallible<std::vector<double>> embed(const Image& image) override {
        const std::uint64_t fp = fingerprint(image);
        if (failures_.contains(fp))
            return Fallible<std::vector<double>>::fail("scripted embedding failure");
        if (auto it = scripted_.find(fp); it != scripted_.end())
            return Fallible<std::vector<double>>::ok(it->second);

        SplitMix64 rng(hash_mix(seed_, fp));
        std::vector<double> v(static_cast<std::size_t>(dim_));
        double norm = 0.0;
        for (auto& x : v) {
            x = fake_detail::gaussian(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : v) x /= norm;
        return Fallible<std::vector<double>>::ok(std::move(v));
    }
    int dimension() const override { return dim_; }
    std::string identity() const override { return "fake-embedding"; }

private:
    std::uint64_t seed_;
    int dim_;
    std::map<std::uint64_t, std::vector<double>> scripted_;
    std::set<std::uint64_t> failures_;
};

class FakeTextImageBackend : public TextImageBackend {
public:
    explicit FakeTextImageBackend(std::uint64_t seed)
        : seed_(fake_detail::role_seed(seed, "text_image")) {}

    void script(std::uint64_t image_fp, const std::string& text, double sim) {
        scripted_[{image_fp, text}] = sim;
    }
    void script_failure(std::uint64_t image_fp, const std::string& text) {
        failures_.insert({image_fp, text});
    }

    Fallible<double> similarity(const Image& image, const std::string& text) override {
        const std::uint64_t fp = fingerprint(image);
        if (failures_.contains({fp, text}))
            return Fallible<double>::fail("scripted text-image failure");
        if (auto it = scripted_.find({fp, text}); it != scripted_.end())
            return Fallible<double>::ok(it->second);
        SplitMix64 rng(hash_mix(hash_mix(seed_, fp), fnv1a64(text)));
        return Fallible<double>::ok(rng.uniform(0.05, 0.95));
    }
    std::string identity() const override { return "fake-text-image"; }

private:
    std::uint64_t seed_;
    std::map<std::pair<std::uint64_t, std::string>, double> scripted_;
    std::set<std::pair<std::uint64_t, std::string>> failures_;
};

// Verdicts come from the scripted response table keyed by request key. In
// seeded mode unscripted requests synthesize a deterministic verdict from
// (seed, kind, key); otherwise they return a typed "no response scripted"
// failure.
class FakeJudgeBackend : public JudgeBackend {
public:
    explicit FakeJudgeBackend(std::uint64_t seed, bool seeded_mode = true)
        : seed_(fake_detail::role_seed(seed, "judge")), seeded_mode_(seeded_mode) {}

    void script(const std::string& key, nlohmann::json verdict) {
        scripted_[key] = std::move(verdict);
    }
    void script_failure(const std::string& key) { failures_.insert(key); }
    void script_raw(const std::string& key, std::string raw_text) {
        raw_scripted_[key] = std::move(raw_text);
    }

    Fallible<std::string> judge(const JudgeRequest& request) override {
        if (failures_.contains(request.key))
            return Fallible<std::string>::fail("scripted judge failure");
        if (auto it = raw_scripted_.find(request.key); it != raw_scripted_.end())
            return Fallible<std::string>::ok(it->second);
        if (auto it = scripted_.find(request.key); it != scripted_.end())
            return Fallible<std::string>::ok(it->second.dump());
        if (!seeded_mode_)
            return Fallible<std::string>::fail("no response scripted for key " + request.key);
        return Fallible<std::string>::ok(synthesize(request).dump());
    }
    std::string identity() const override { return "fake-judge"; }

    // Seeded verdict synthesis; part of the fake-table contract.
    nlohmann::json synthesize(const JudgeRequest& request) const {
        SplitMix64 rng(hash_mix(hash_mix(seed_, fnv1a64(request.key)),
                                fnv1a64(to_string(request.kind))));
        auto score = [&](int lo, int hi) {
            return static_cast<int>(lo + rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
        };
        nlohmann::json out;
        switch (request.kind) {
            case JudgeKind::fidelity: {
                out["overall"] = score(4, 9);
                nlohmann::json crit;
                for (const auto& c : request.payload.value("criteria", nlohmann::json::array()))
                    crit[c.get<std::string>()] = score(3, 9);
                out["criteria"] = std::move(crit);
                break;
            }
            case JudgeKind::action: {
                out["overall"] = score(4, 9);
                out["depicted"] = rng.next_double() < 0.7;
                out["subject_identity"] = score(4, 9);
                out["subject_action"] = score(4, 9);
                if (references_object(request.payload))
                    out["object_interaction"] = score(4, 9);
                else
                    out["object_interaction"] = nullptr;
                out["motion_quality"] = score(4, 9);
                break;
            }
            case JudgeKind::pairwise:
            case JudgeKind::scene: {
                out["same"] = rng.next_double() < (request.kind == JudgeKind::scene ? 0.70 : 0.65);
                out["similarity"] = score(3, 9);
                nlohmann::json crit;
                for (const auto& c : request.payload.value("criteria", nlohmann::json::array())) {
                    if (rng.next_double() < 0.10)
                        crit[c.get<std::string>()] = nullptr;
                    else
                        crit[c.get<std::string>()] = score(3, 9);
                }
                out["criteria"] = std::move(crit);
                break;
            }
        }
        return out;
    }

    // The seeded judge declares "no object referenced" when none of the
    // scheduled object names occurs in the action text (case-insensitive).
    static bool references_object(const nlohmann::json& payload) {
        const std::string text = fake_detail::lower(payload.value("action_text", ""));
        for (const auto& n : payload.value("object_names", nlohmann::json::array())) {
            const std::string name = fake_detail::lower(n.get<std::string>());
            if (!name.empty() && text.find(name) != std::string::npos) return true;
        }
        return false;
    }

private:
    std::uint64_t seed_;
    bool seeded_mode_;
    std::map<std::string, nlohmann::json> scripted_;
    std::map<std::string, std::string> raw_scripted_;
    std::set<std::string> failures_;
};

class FakeFlowBackend : public FlowBackend {
public:
    explicit FakeFlowBackend(std::uint64_t seed)
        : seed_(fake_detail::role_seed(seed, "flow")) {}

    void script_magnitude(std::uint64_t fp_a, std::uint64_t fp_b, double mag) {
        mags_[{fp_a, fp_b}] = mag;
    }
    void script_quality(double q) { fixed_quality_ = q; }

    Fallible<double> mean_flow_magnitude(const Image& a, const Image& b) override {
        const auto key = std::make_pair(fingerprint(a), fingerprint(b));
        if (auto it = mags_.find(key); it != mags_.end()) return Fallible<double>::ok(it->second);
        SplitMix64 rng(hash_mix(hash_mix(seed_, key.first), key.second));
        return Fallible<double>::ok(rng.uniform(0.0, 2.0));
    }
    Fallible<double> interpolation_quality(const Image& prev, const Image& mid,
                                           const Image& next) override {
        if (fixed_quality_) return Fallible<double>::ok(*fixed_quality_);
        SplitMix64 rng(hash_mix(hash_mix(hash_mix(seed_, fingerprint(prev)), fingerprint(mid)),
                                fingerprint(next)));
        return Fallible<double>::ok(rng.uniform(0.5, 1.0));
    }
    std::string identity() const override { return "fake-flow"; }

private:
    std::uint64_t seed_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> mags_;
    std::optional<double> fixed_quality_;
};

class FakeScalarPredictorBackend : public ScalarPredictorBackend {
public:
    FakeScalarPredictorBackend(std::uint64_t seed, const char* role, double lo, double hi,
                               double synth_lo, double synth_hi)
        : seed_(fake_detail::role_seed(seed, role)),
          lo_(lo),
          hi_(hi),
          synth_lo_(synth_lo),
          synth_hi_(synth_hi),
          role_(role) {}

    void script(std::uint64_t image_fp, double v) { scripted_[image_fp] = v; }
    void script_constant(double v) { constant_ = v; }

    Fallible<double> score(const Image& image) override {
        if (constant_) return Fallible<double>::ok(*constant_);
        const std::uint64_t fp = fingerprint(image);
        if (auto it = scripted_.find(fp); it != scripted_.end())
            return Fallible<double>::ok(it->second);
        SplitMix64 rng(hash_mix(seed_, fp));
        return Fallible<double>::ok(rng.uniform(synth_lo_, synth_hi_));
    }
    double range_lo() const override { return lo_; }
    double range_hi() const override { return hi_; }
    std::string identity() const override { return std::string("fake-") + role_; }

private:
    std::uint64_t seed_;
    double lo_, hi_, synth_lo_, synth_hi_;
    std::string role_;
    std::map<std::uint64_t, double> scripted_;
    std::optional<double> constant_;
};

// The full deterministic suite used by `evaluate --fake-backends <seed>` and
// by every offline test.
inline BackendSuite fake_suite(std::uint64_t seed) {
    BackendSuite s;
    s.grounding = std::make_shared<FakeGroundingBackend>(seed);
    s.embedding = std::make_shared<FakeEmbeddingBackend>(seed);
    s.text_image = std::make_shared<FakeTextImageBackend>(seed);
    s.judge = std::make_shared<FakeJudgeBackend>(seed);
    s.flow = std::make_shared<FakeFlowBackend>(seed);
    s.aesthetic =
        std::make_shared<FakeScalarPredictorBackend>(seed, "aesthetic", 0.0, 1.0, 0.3, 0.9);
    s.imaging =
        std::make_shared<FakeScalarPredictorBackend>(seed, "imaging", 0.0, 100.0, 30.0, 90.0);
    return s;
}

}  // namespace episcope
