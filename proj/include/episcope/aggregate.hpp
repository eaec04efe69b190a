#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "episcope/metric_value.hpp"

namespace episcope {

// Benchmark-level aggregate of one metric: the instance-weighted,
// gate-corrected mean and its decomposition.
struct AggregateRow {
    std::optional<double> corrected;  // m-bar
    std::optional<double> rawmean;
    std::optional<double> coverage;
    long n_eval = 0;
    long n_failed = 0;
    long n_skipped = 0;
    long episodes_with_value = 0;
};

// m-bar = sum(v_E * n_eval_E) / sum(n_eval_E + n_skip_E + n_fail_E)
// rawmean = sum(v_E * n_eval_E) / sum(n_eval_E)
// coverage = sum(n_eval_E) / sum(all counts)
// so m-bar = rawmean * coverage exactly in exact arithmetic. Episodes with
// v=None contribute only denominator mass (their n_eval is zero by the
// strict contract).
inline AggregateRow gate_corrected_mean(const std::vector<MetricValue>& episode_rows) {
    AggregateRow out;
    double weighted_sum = 0.0;
    for (const auto& row : episode_rows) {
        if (row.value) {
            weighted_sum += *row.value * static_cast<double>(row.n_eval);
            ++out.episodes_with_value;
        }
        out.n_eval += row.n_eval;
        out.n_failed += row.n_failed;
        out.n_skipped += row.n_skipped;
    }
    const long total = out.n_eval + out.n_failed + out.n_skipped;
    if (total > 0) {
        out.corrected = weighted_sum / static_cast<double>(total);
        out.coverage = static_cast<double>(out.n_eval) / static_cast<double>(total);
    }
    if (out.n_eval > 0) out.rawmean = weighted_sum / static_cast<double>(out.n_eval);
    if (out.n_eval == 0) out.corrected.reset();  // no evaluated mass: None, not 0
    return out;
}

// ---------------------------------------------------------------------------
// Effect sizes

struct EffectSize {
    std::string metric;
    double delta = 0.0;                // mean paired difference (A minus B)
    std::optional<double> pooled_d;    // mean(delta) / s_pooled
    std::optional<double> d_z;         // mean(delta) / sd(delta)
    long n_paired = 0;
};

struct InsufficientPairing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline double sample_variance(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / (n - 1.0);
}
}  // namespace detail

// Paired effect sizes on the episodes where both methods produced a value.
// Pooled d uses s_pooled = sqrt((s_A^2 + s_B^2) / 2) over the paired subset
// with n-1 variances; d_z = mean(delta)/sd(delta). Zero-variance statistics
// are None rather than signed infinity.
inline EffectSize cohens_d(const std::string& metric,
                           const std::map<std::string, std::optional<double>>& method_a,
                           const std::map<std::string, std::optional<double>>& method_b) {
    std::vector<double> a, b, delta;
    for (const auto& [episode, va] : method_a) {
        if (!va) continue;
        const auto it = method_b.find(episode);
        if (it == method_b.end() || !it->second) continue;
        a.push_back(*va);
        b.push_back(*it->second);
        delta.push_back(*va - *it->second);
    }
    if (delta.size() < 2)
        throw InsufficientPairing("insufficient pairing for metric " + metric + ": " +
                                  std::to_string(delta.size()) + " paired episodes");
    EffectSize out;
    out.metric = metric;
    out.n_paired = static_cast<long>(delta.size());
    double mean_delta = 0.0;
    for (double d : delta) mean_delta += d;
    mean_delta /= static_cast<double>(delta.size());
    out.delta = mean_delta;

    const double s_pooled =
        std::sqrt((detail::sample_variance(a) + detail::sample_variance(b)) / 2.0);
    if (s_pooled > 0.0) out.pooled_d = mean_delta / s_pooled;
    const double sd_delta = std::sqrt(detail::sample_variance(delta));
    if (sd_delta > 0.0) out.d_z = mean_delta / sd_delta;
    return out;
}

// ---------------------------------------------------------------------------
// Gap-decay binning

struct GapBin {
    int lo = 0;
    int hi = 0;  // inclusive
};

inline const std::vector<GapBin>& default_gap_bins() {
    static const std::vector<GapBin> bins = {{1, 2}, {3, 5}, {6, 10}, {11, 20}, {21, 50}};
    return bins;
}

struct GapBinCell {
    std::optional<double> mean_sim;  // None when the bin is empty
    long count = 0;
};

struct GapBinReport {
    std::vector<GapBin> bins;
    // index: [type][bin]
    std::map<std::string, std::vector<GapBinCell>> by_type;
    long out_of_range = 0;  // records outside every bin, dropped with count
};

// Bins (gap, sim, type) records into disjoint ordered integer intervals.
// Records beyond the last bin are dropped but counted.
template <typename Records>
GapBinReport gap_bin_report(const Records& records,
                            const std::vector<GapBin>& bins = default_gap_bins()) {
    GapBinReport report;
    report.bins = bins;
    std::map<std::string, std::vector<double>> sums;
    for (const auto& rec : records) {
        const std::string type = to_string(rec.type);
        auto& cells = report.by_type[type];
        if (cells.empty()) {
            cells.resize(bins.size());
            sums[type].assign(bins.size(), 0.0);
        }
        bool placed = false;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (rec.gap >= bins[i].lo && rec.gap <= bins[i].hi) {
                sums[type][i] += rec.sim;
                ++cells[i].count;
                placed = true;
                break;
            }
        }
        if (!placed) ++report.out_of_range;
    }
    for (auto& [type, cells] : report.by_type)
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].count > 0)
                cells[i].mean_sim = sums[type][i] / static_cast<double>(cells[i].count);
    return report;
}

// ---------------------------------------------------------------------------
// Per-tier slicing

// Episode rows tagged with tier; the caller guarantees tiers are valid.
struct TierSlice {
    std::map<std::string, AggregateRow> metrics;  // metric name -> aggregate
};

inline std::map<std::string, TierSlice> per_tier_breakdown(
    const std::vector<std::pair<std::string, std::map<std::string, MetricValue>>>&
        episode_metrics_by_tier) {
    std::map<std::string, std::map<std::string, std::vector<MetricValue>>> grouped;
    for (const auto& [tier, metrics] : episode_metrics_by_tier)
        for (const auto& [name, row] : metrics) grouped[tier][name].push_back(row);
    std::map<std::string, TierSlice> out;
    for (const auto& [tier, by_metric] : grouped) {
        TierSlice slice;
        for (const auto& [name, rows] : by_metric) slice.metrics[name] = gate_corrected_mean(rows);
        out[tier] = std::move(slice);
    }
    return out;
}

}  // namespace episcope
