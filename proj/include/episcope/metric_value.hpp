#pragma once

#include <optional>
#include <span>
#include <vector>

namespace episcope {

// The strict metric-value contract: every metric is a (value, n_eval,
// n_failed, n_skipped) tuple. A metric with n_eval == 0 has value == nullopt,
// never a substituted 0. n_failed counts items whose underlying computation
// errored; n_skipped counts items legitimately excluded.
struct MetricValue {
    std::optional<double> value;
    long n_eval = 0;
    long n_failed = 0;
    long n_skipped = 0;

    bool holds_contract() const { return (n_eval == 0) == !value.has_value(); }

    static MetricValue skipped(long n = 1) { return MetricValue{std::nullopt, 0, 0, n}; }
    static MetricValue failed(long n = 1) { return MetricValue{std::nullopt, 0, n, 0}; }
    static MetricValue of(double v, long n_eval = 1) { return MetricValue{v, n_eval, 0, 0}; }
    static MetricValue empty() { return MetricValue{std::nullopt, 0, 0, 0}; }
};

// One raw observation feeding a mean: a value, or a miss that is either a
// failure or a legitimate skip.
struct Sample {
    std::optional<double> value;
    bool failed = false;

    static Sample of(double v) { return Sample{v, false}; }
    static Sample skip() { return Sample{std::nullopt, false}; }
    static Sample fail() { return Sample{std::nullopt, true}; }
};

// Mean over the non-None samples; None samples land in n_failed or n_skipped.
// All-None input yields (None, 0, ...), never 0.
inline MetricValue none_skip_mean(std::span<const Sample> samples) {
    MetricValue out;
    double sum = 0.0;
    for (const auto& s : samples) {
        if (s.value) {
            sum += *s.value;
            ++out.n_eval;
        } else if (s.failed) {
            ++out.n_failed;
        } else {
            ++out.n_skipped;
        }
    }
    if (out.n_eval > 0) out.value = sum / static_cast<double>(out.n_eval);
    return out;
}

inline MetricValue none_skip_mean(const std::vector<Sample>& samples) {
    return none_skip_mean(std::span<const Sample>(samples));
}

// Collapses per-item rows into one row: unweighted mean over the rows that
// carry a value, counts summed. This is the shot->episode step for metrics
// whose instances are shots.
inline MetricValue combine_rows(std::span<const MetricValue> rows) {
    MetricValue out;
    double sum = 0.0;
    long valued = 0;
    for (const auto& r : rows) {
        if (r.value) {
            sum += *r.value;
            ++valued;
        }
        out.n_eval += r.n_eval;
        out.n_failed += r.n_failed;
        out.n_skipped += r.n_skipped;
    }
    if (valued > 0) out.value = sum / static_cast<double>(valued);
    return out;
}

inline MetricValue combine_rows(const std::vector<MetricValue>& rows) {
    return combine_rows(std::span<const MetricValue>(rows));
}

}  // namespace episcope
