#pragma once

#include <array>
#include <string>
#include <vector>

namespace ragat {

// Shared 2x2 confusion matrix plus the two per-class "positive" views.
struct ConfusionCounts {
    // counts[label][pred]
    std::array<std::array<long long, 2>, 2> counts{{{0, 0}, {0, 0}}};
    long long total = 0;

    struct View {
        long long tp = 0, fp = 0, fn = 0, tn = 0;
    };
    View view(int positive_class) const;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::array<double, 2> precision{};
    std::array<double, 2> recall{};
    std::array<double, 2> f1{};
    std::array<long long, 2> support{};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    long long total = 0;
};

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels);

// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); zero denominators yield 0.
// Macro values are unweighted two-class means.
MetricsReport compute_metrics(const ConfusionCounts& c);

// Fixed-width per-class table plus accuracy and macro rows, 4 decimals.
std::string format_report(const MetricsReport& r);

// Tab-separated single-line variant for machine consumption.
std::string format_report_tsv(const MetricsReport& r);

}  // namespace ragat
