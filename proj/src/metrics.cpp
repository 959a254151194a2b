#include "mdrkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdrkit/errors.hpp"

namespace mdrkit {

json ConfusionMatrix::to_json() const {
    return json{{"tp", tp}, {"tn", tn}, {"fp", fp}, {"fn", fn}};
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion: label and prediction lengths differ");
    if (y_true.empty()) throw DataError("confusion: empty input");
    ConfusionMatrix cm;
    for (size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw DataError("confusion: entries must be binary");
        if (t == 1 && p == 1)
            ++cm.tp;
        else if (t == 0 && p == 0)
            ++cm.tn;
        else if (t == 0 && p == 1)
            ++cm.fp;
        else
            ++cm.fn;
    }
    return cm;
}

namespace {

double ratio_or_zero(double num, double den, const char* name, std::vector<std::string>& flags) {
    if (den == 0.0) {
        flags.push_back(name);
        return 0.0;
    }
    return num / den;
}

double harmonic_f1(double p, double r, const char* name, std::vector<std::string>& flags) {
    return ratio_or_zero(2.0 * p * r, p + r, name, flags);
}

}  // namespace

MetricsReport scalar_metrics(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw DataError("scalar_metrics: empty confusion matrix");
    MetricsReport r;
    r.cm = cm;
    auto& flags = r.zero_division_flags;
    const double tp = static_cast<double>(cm.tp), tn = static_cast<double>(cm.tn);
    const double fp = static_cast<double>(cm.fp), fn = static_cast<double>(cm.fn);
    const double total = tp + tn + fp + fn;

    r.accuracy = (tp + tn) / total;
    r.precision = ratio_or_zero(tp, tp + fp, "precision", flags);
    r.recall = ratio_or_zero(tp, tp + fn, "recall", flags);
    r.specificity = ratio_or_zero(tn, tn + fp, "specificity", flags);
    r.f1 = harmonic_f1(r.precision, r.recall, "f1", flags);

    // Class-0 counterparts: swap the roles of the two classes.
    double precision0 = ratio_or_zero(tn, tn + fn, "precision_class0", flags);
    double recall0 = r.specificity;
    double f1_0 = harmonic_f1(precision0, recall0, "f1_class0", flags);

    double mcc_den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    r.mcc = ratio_or_zero(tp * tn - fp * fn, mcc_den, "mcc", flags);

    r.macro_precision = 0.5 * (precision0 + r.precision);
    r.macro_recall = 0.5 * (recall0 + r.recall);
    r.macro_f1 = 0.5 * (f1_0 + r.f1);

    const double support1 = tp + fn, support0 = tn + fp;
    r.weighted_precision = (support0 * precision0 + support1 * r.precision) / total;
    r.weighted_recall = (support0 * recall0 + support1 * r.recall) / total;
    r.weighted_f1 = (support0 * f1_0 + support1 * r.f1) / total;
    return r;
}

json MetricsReport::to_json() const {
    json j{{"confusion", cm.to_json()},
           {"accuracy", accuracy},
           {"precision", precision},
           {"recall", recall},
           {"specificity", specificity},
           {"f1", f1},
           {"mcc", mcc},
           {"macro_precision", macro_precision},
           {"macro_recall", macro_recall},
           {"macro_f1", macro_f1},
           {"weighted_precision", weighted_precision},
           {"weighted_recall", weighted_recall},
           {"weighted_f1", weighted_f1},
           {"zero_division_flags", zero_division_flags}};
    if (roc_auc >= 0) j["roc_auc"] = roc_auc;
    if (prc_auc >= 0) j["prc_auc"] = prc_auc;
    return j;
}

json RankingCurve::to_json() const {
    json pts = json::array();
    for (const auto& [x, y] : points) pts.push_back(json::array({x, y}));
    return json{{"kind", kind == Kind::ROC ? "roc" : "pr"}, {"points", pts}, {"auc", auc}};
}

namespace {

// Indices sorted by score descending; ties grouped by the caller.
std::vector<size_t> order_by_score_desc(const std::vector<double>& scores) {
    std::vector<size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    return idx;
}

}  // namespace

RankingCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size()) throw DataError("roc_auc: length mismatch");
    int64_t pos = std::count(y_true.begin(), y_true.end(), 1);
    int64_t neg = static_cast<int64_t>(y_true.size()) - pos;
    if (pos == 0 || neg == 0) throw DataError("roc_auc: both classes required for a curve");

    auto idx = order_by_score_desc(scores);
    RankingCurve curve;
    curve.kind = RankingCurve::Kind::ROC;
    curve.points.emplace_back(0.0, 0.0);

    int64_t tp = 0, fp = 0;
    double auc = 0.0, prev_fpr = 0.0, prev_tpr = 0.0;
    size_t i = 0;
    while (i < idx.size()) {
        double s = scores[idx[i]];
        // consume the whole tie group at this threshold
        while (i < idx.size() && scores[idx[i]] == s) {
            if (y_true[idx[i]] == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        curve.points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

RankingCurve pr_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size()) throw DataError("pr_auc: length mismatch");
    int64_t pos = std::count(y_true.begin(), y_true.end(), 1);
    if (pos == 0) throw DataError("pr_auc: no positive labels, curve undefined");

    auto idx = order_by_score_desc(scores);
    RankingCurve curve;
    curve.kind = RankingCurve::Kind::PR;

    // Average-precision stepping: sum (R_k - R_{k-1}) * P_k over distinct
    // thresholds in descending order.
    int64_t tp = 0, fp = 0;
    double ap = 0.0, prev_recall = 0.0;
    size_t i = 0;
    while (i < idx.size()) {
        double s = scores[idx[i]];
        while (i < idx.size() && scores[idx[i]] == s) {
            if (y_true[idx[i]] == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        double recall = static_cast<double>(tp) / static_cast<double>(pos);
        double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        curve.points.emplace_back(recall, precision);
        prev_recall = recall;
    }
    curve.auc = ap;
    return curve;
}

std::vector<int> threshold_labels(const std::vector<double>& scores, double threshold) {
    std::vector<int> out(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
    return out;
}

MetricsReport evaluate(const std::vector<int>& y_true, const std::vector<double>& scores) {
    MetricsReport r = scalar_metrics(confusion(y_true, threshold_labels(scores)));
    r.roc_auc = roc_auc(y_true, scores).auc;
    r.prc_auc = pr_auc(y_true, scores).auc;
    return r;
}

double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    ConfusionMatrix cm = confusion(y_true, y_pred);
    double p_den = static_cast<double>(cm.tp + cm.fp);
    double r_den = static_cast<double>(cm.tp + cm.fn);
    double p = p_den > 0 ? cm.tp / p_den : 0.0;
    double r = r_den > 0 ? cm.tp / r_den : 0.0;
    return (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace mdrkit
