#pragma once

#include <cstdint>
#include <vector>

#include "mdrkit/jsonio.hpp"

namespace mdrkit {

// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x), via the
// usual series / continued-fraction pair. Accurate to ~1e-10 on the tested
// range [0, 50].
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b), Lentz continued fraction.
double beta_inc(double a, double b, double x);

// Survival function of the chi-squared distribution with k dof.
double chi2_sf(double x, double k);

// Two-sided p-value of a Student-t statistic with the given dof.
double student_t_two_sided_p(double t, double dof);

// Two-sided exact binomial test with p0 = 1/2: min(1, 2 * P(X <= min(k, n-k))).
double binom_test_two_sided_half(int64_t k, int64_t n);

struct DiscordantPairs {
    int64_t b = 0;  // A correct, B wrong
    int64_t c = 0;  // A wrong, B correct
    int64_t n_concordant = 0;
};

DiscordantPairs discordant_pairs(const std::vector<int>& y_true, const std::vector<int>& pred_a,
                                 const std::vector<int>& pred_b);

enum class TestMethod { McNemarChi2, McNemarExact, PairedT, Degenerate };

const char* test_method_name(TestMethod m);

struct TestResult {
    double statistic = 0;
    bool has_statistic = false;
    double p_value = 1.0;
    // false only for the zero-variance nonzero-mean paired-t case, where the
    // p-value is stored as 0 by convention.
    bool p_value_computable = true;
    TestMethod method = TestMethod::Degenerate;
    bool significant_at_05 = false;

    json to_json() const;
};

// McNemar test on paired predictions: continuity-corrected chi-squared when
// b + c >= 25, exact binomial below that, degenerate (p = 1) when b + c = 0.
TestResult mcnemar(const std::vector<int>& y_true, const std::vector<int>& pred_a,
                   const std::vector<int>& pred_b);

// Paired t-test over per-fold metric values.
TestResult paired_t(const std::vector<double>& scores_a, const std::vector<double>& scores_b);

}  // namespace mdrkit
