#include "mdrkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdrkit/errors.hpp"

namespace mdrkit {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kFpMin = 1e-300;

// Series expansion for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Lentz continued fraction for the incomplete beta.
double beta_cf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw NumericError("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw NumericError("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double beta_inc(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0) throw NumericError("beta_inc: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi2_sf(double x, double k) {
    if (x < 0.0) return 1.0;
    return gamma_q(k / 2.0, x / 2.0);
}

double student_t_two_sided_p(double t, double dof) {
    if (dof <= 0.0) throw NumericError("student_t_two_sided_p: dof must be positive");
    return beta_inc(dof / 2.0, 0.5, dof / (dof + t * t));
}

double binom_test_two_sided_half(int64_t k, int64_t n) {
    if (n <= 0 || k < 0 || k > n) throw NumericError("binom_test: invalid counts");
    int64_t lo = std::min(k, n - k);
    // Tail mass P(X <= lo) with exact log-binomial terms.
    double tail = 0.0;
    for (int64_t i = 0; i <= lo; ++i) {
        double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                          n * std::log(2.0);
        tail += std::exp(log_term);
    }
    return std::min(1.0, 2.0 * tail);
}

DiscordantPairs discordant_pairs(const std::vector<int>& y_true, const std::vector<int>& pred_a,
                                 const std::vector<int>& pred_b) {
    if (y_true.size() != pred_a.size() || y_true.size() != pred_b.size())
        throw DataError("discordant_pairs: length mismatch");
    DiscordantPairs d;
    for (size_t i = 0; i < y_true.size(); ++i) {
        bool ok_a = pred_a[i] == y_true[i];
        bool ok_b = pred_b[i] == y_true[i];
        if (ok_a && !ok_b)
            ++d.b;
        else if (!ok_a && ok_b)
            ++d.c;
        else
            ++d.n_concordant;
    }
    return d;
}

const char* test_method_name(TestMethod m) {
    switch (m) {
        case TestMethod::McNemarChi2: return "mcnemar_chi2";
        case TestMethod::McNemarExact: return "mcnemar_exact";
        case TestMethod::PairedT: return "paired_t";
        case TestMethod::Degenerate: return "degenerate";
    }
    return "unknown";
}

json TestResult::to_json() const {
    json j{{"p_value", p_value},
           {"p_value_computable", p_value_computable},
           {"method", test_method_name(method)},
           {"significant_at_05", significant_at_05}};
    if (has_statistic) j["statistic"] = statistic;
    return j;
}

TestResult mcnemar(const std::vector<int>& y_true, const std::vector<int>& pred_a,
                   const std::vector<int>& pred_b) {
    DiscordantPairs d = discordant_pairs(y_true, pred_a, pred_b);
    TestResult r;
    int64_t n = d.b + d.c;
    if (n == 0) {
        r.method = TestMethod::Degenerate;
        r.p_value = 1.0;
    } else if (n >= 25) {
        double diff = std::fabs(static_cast<double>(d.b - d.c)) - 1.0;  // continuity correction
        r.statistic = diff * diff / static_cast<double>(n);
        r.has_statistic = true;
        r.method = TestMethod::McNemarChi2;
        r.p_value = chi2_sf(r.statistic, 1.0);
    } else {
        r.method = TestMethod::McNemarExact;
        r.p_value = binom_test_two_sided_half(d.b, n);
    }
    r.significant_at_05 = r.p_value < 0.05;
    return r;
}

TestResult paired_t(const std::vector<double>& scores_a, const std::vector<double>& scores_b) {
    if (scores_a.size() != scores_b.size()) throw DataError("paired_t: length mismatch");
    size_t k = scores_a.size();
    if (k < 2) throw DataError("paired_t: at least 2 paired scores required");

    double mean = 0.0;
    for (size_t i = 0; i < k; ++i) mean += scores_a[i] - scores_b[i];
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (size_t i = 0; i < k; ++i) {
        double d = (scores_a[i] - scores_b[i]) - mean;
        ss += d * d;
    }
    double var = ss / static_cast<double>(k - 1);

    TestResult r;
    if (var == 0.0) {
        r.method = TestMethod::Degenerate;
        if (mean == 0.0) {
            r.p_value = 1.0;
        } else {
            r.p_value = 0.0;
            r.p_value_computable = false;
        }
    } else {
        double sd = std::sqrt(var);
        r.statistic = mean / (sd / std::sqrt(static_cast<double>(k)));
        r.has_statistic = true;
        r.method = TestMethod::PairedT;
        r.p_value = student_t_two_sided_p(r.statistic, static_cast<double>(k - 1));
    }
    r.significant_at_05 = r.p_value < 0.05;
    return r;
}

}  // namespace mdrkit
