#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdrkit/jsonio.hpp"

namespace mdrkit {

// Positive class is MDR = 1 throughout.
struct ConfusionMatrix {
    int64_t tp = 0;
    int64_t tn = 0;
    int64_t fp = 0;
    int64_t fn = 0;

    int64_t total() const { return tp + tn + fp + fn; }
    json to_json() const;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

struct MetricsReport {
    ConfusionMatrix cm;
    double accuracy = 0;
    double precision = 0;
    double recall = 0;  // sensitivity
    double specificity = 0;
    double f1 = 0;
    double mcc = 0;
    double macro_precision = 0;
    double macro_recall = 0;
    double macro_f1 = 0;
    double weighted_precision = 0;
    double weighted_recall = 0;
    double weighted_f1 = 0;
    double roc_auc = -1;  // -1 until filled by evaluate()
    double prc_auc = -1;
    // Metric names where a 0/0 was resolved to 0 by convention.
    std::vector<std::string> zero_division_flags;

    json to_json() const;
};

MetricsReport scalar_metrics(const ConfusionMatrix& cm);

struct RankingCurve {
    enum class Kind { ROC, PR };
    Kind kind = Kind::ROC;
    std::vector<std::pair<double, double>> points;  // ROC: (FPR, TPR); PR: (recall, precision)
    double auc = 0;

    json to_json() const;
};

RankingCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);
RankingCurve pr_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

// Hard labels at 0.5, scalar metrics, and both ranking curves in one report.
MetricsReport evaluate(const std::vector<int>& y_true, const std::vector<double>& scores);

// F1 of the positive class for hard predictions; the tuning objective.
double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred);

std::vector<int> threshold_labels(const std::vector<double>& scores, double threshold = 0.5);

}  // namespace mdrkit
