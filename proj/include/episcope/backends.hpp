#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "episcope/common.hpp"
#include "episcope/image.hpp"

namespace episcope {

struct Detection {
    Box box;
    double confidence = 0.0;  // in [0, 1], already thresholded by the backend
};

// Open-vocabulary detector: (image, text query) -> detections. Box and text
// thresholds are applied inside the backend.
class GroundingBackend {
public:
    virtual ~GroundingBackend() = default;
    virtual Fallible<std::vector<Detection>> detect(const Image& image,
                                                    const std::string& query) = 0;
    virtual std::string identity() const = 0;
};

// image -> unit-norm vector of fixed dimension.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual Fallible<std::vector<double>> embed(const Image& image) = 0;
    virtual int dimension() const = 0;
    virtual std::string identity() const = 0;
};

// (image, text) -> similarity in [-1, 1].
class TextImageBackend {
public:
    virtual ~TextImageBackend() = default;
    virtual Fallible<double> similarity(const Image& image, const std::string& text) = 0;
    virtual std::string identity() const = 0;
};

enum class JudgeKind { fidelity, action, pairwise, scene };

inline const char* to_string(JudgeKind k) {
    switch (k) {
        case JudgeKind::fidelity: return "fidelity";
        case JudgeKind::action: return "action";
        case JudgeKind::pairwise: return "pairwise";
        case JudgeKind::scene: return "scene";
    }
    return "?";
}

// One multimodal judge call. `key` is a canonical identity for the judged
// instance (used for audit rows and by scriptable fakes); `payload` carries
// the structured fields the prompt was rendered from.
struct JudgeRequest {
    JudgeKind kind = JudgeKind::fidelity;
    std::string key;
    std::vector<Image> images;
    std::string prompt;
    nlohmann::json payload;

    std::uint64_t request_hash() const {
        std::uint64_t h = fnv1a64(key);
        h = hash_mix(h, fnv1a64(prompt));
        for (const auto& img : images) h = hash_mix(h, fingerprint(img));
        return h;
    }
};

// Returns the raw verdict document (JSON text) or a typed failure. Parsing,
// range checks and 1-10 -> [0,1] normalization happen in the adapter layer,
// never downstream of it.
class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual Fallible<std::string> judge(const JudgeRequest& request) = 0;
    virtual std::string identity() const = 0;
};

// Optical-flow service: pairwise mean flow magnitude (pixels) and triplet
// interpolation-reconstruction quality in [0, 1].
class FlowBackend {
public:
    virtual ~FlowBackend() = default;
    virtual Fallible<double> mean_flow_magnitude(const Image& a, const Image& b) = 0;
    virtual Fallible<double> interpolation_quality(const Image& prev, const Image& mid,
                                                   const Image& next) = 0;
    virtual std::string identity() const = 0;
};

// image -> scalar score within a declared range.
class ScalarPredictorBackend {
public:
    virtual ~ScalarPredictorBackend() = default;
    virtual Fallible<double> score(const Image& image) = 0;
    virtual double range_lo() const = 0;
    virtual double range_hi() const = 0;
    virtual std::string identity() const = 0;
};

struct BackendSuite {
    std::shared_ptr<GroundingBackend> grounding;
    std::shared_ptr<EmbeddingBackend> embedding;
    std::shared_ptr<TextImageBackend> text_image;
    std::shared_ptr<JudgeBackend> judge;
    std::shared_ptr<FlowBackend> flow;
    std::shared_ptr<ScalarPredictorBackend> aesthetic;   // [0, 1]
    std::shared_ptr<ScalarPredictorBackend> imaging;     // [0, 100]
};

struct ContractReport {
    std::vector<std::string> violations;     // contract breaches
    std::vector<std::string> connectivity;   // backend unreachable / call failed
    bool clean() const { return violations.empty() && connectivity.empty(); }
};

// Probes a suite for determinism on repeated identical calls, output-range
// invariants and failure typing. Fakes and real adapters must both pass.
inline ContractReport verify_backend_contract(BackendSuite& suite,
                                              const std::vector<Image>& probe_images,
                                              const std::string& probe_query = "a person") {
    ContractReport report;
    auto violation = [&](std::string m) { report.violations.push_back(std::move(m)); };
    auto down = [&](std::string m) { report.connectivity.push_back(std::move(m)); };

    for (const auto& img : probe_images) {
        if (suite.grounding) {
            auto a = suite.grounding->detect(img, probe_query);
            auto b = suite.grounding->detect(img, probe_query);
            if (!a || !b) {
                down("grounding: " + (a ? b.error() : a.error()));
            } else {
                if (a.value().size() != b.value().size())
                    violation("grounding not deterministic on identical calls");
                for (const auto& d : a.value()) {
                    if (d.confidence < 0.0 || d.confidence > 1.0)
                        violation("grounding confidence outside [0,1]");
                    if (d.box.x1 < 0 || d.box.y1 < 0 || d.box.x2 > img.width ||
                        d.box.y2 > img.height || d.box.area() <= 0)
                        violation("grounding box outside image bounds or degenerate");
                }
            }
        }
        if (suite.embedding) {
            auto a = suite.embedding->embed(img);
            auto b = suite.embedding->embed(img);
            if (!a || !b) {
                down("embedding: " + (a ? b.error() : a.error()));
            } else {
                if (a.value() != b.value()) violation("embedding not deterministic");
                if (static_cast<int>(a.value().size()) != suite.embedding->dimension())
                    violation("embedding dimension differs from declared dimension");
                double norm = 0.0;
                for (double v : a.value()) norm += v * v;
                norm = std::sqrt(norm);
                if (std::abs(norm - 1.0) > 1e-6) violation("embedding not unit-norm");
            }
        }
        if (suite.text_image) {
            auto a = suite.text_image->similarity(img, probe_query);
            auto b = suite.text_image->similarity(img, probe_query);
            if (!a || !b) {
                down("text_image: " + (a ? b.error() : a.error()));
            } else {
                if (a.value() != b.value()) violation("text-image similarity not deterministic");
                if (a.value() < -1.0 || a.value() > 1.0)
                    violation("text-image similarity outside [-1,1]");
            }
        }
        auto check_scalar = [&](ScalarPredictorBackend* p, const char* name) {
            if (!p) return;
            auto a = p->score(img);
            if (!a) {
                down(std::string(name) + ": " + a.error());
                return;
            }
            if (a.value() < p->range_lo() || a.value() > p->range_hi())
                violation(std::string(name) + " score outside declared range");
        };
        check_scalar(suite.aesthetic.get(), "aesthetic");
        check_scalar(suite.imaging.get(), "imaging");
    }

    if (suite.flow && probe_images.size() >= 2) {
        auto m = suite.flow->mean_flow_magnitude(probe_images[0], probe_images[1]);
        if (!m)
            down("flow: " + m.error());
        else if (m.value() < 0.0)
            violation("flow magnitude negative");
        if (probe_images.size() >= 3) {
            auto q = suite.flow->interpolation_quality(probe_images[0], probe_images[1],
                                                       probe_images[2]);
            if (!q)
                down("flow interpolation: " + q.error());
            else if (q.value() < 0.0 || q.value() > 1.0)
                violation("interpolation quality outside [0,1]");
        }
    }

    if (suite.judge && !probe_images.empty()) {
        JudgeRequest req;
        req.kind = JudgeKind::fidelity;
        req.key = "probe|contract";
        req.images = {probe_images.front()};
        req.prompt = "contract probe";
        auto a = suite.judge->judge(req);
        if (a) {
            if (!nlohmann::json::accept(a.value()))
                violation("judge returned a non-structured verdict");
        }
        // a typed failure is a legitimate outcome for an unscripted fake; only
        // free text escaping as a "success" breaks the contract
    }
    return report;
}

}  // namespace episcope
