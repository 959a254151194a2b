#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mdrkit/jsonio.hpp"
#include "mdrkit/tree.hpp"

namespace mdrkit {

enum class ModelKind { LogisticRegression, RandomForest, AdaBoost, GbdtLevelWise, GbdtLeafWise };

const char* kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);
std::vector<ModelKind> all_model_kinds();

// Probability clamp applied to every sigmoid/log computation.
constexpr double kProbEps = 1e-6;

double sigmoid(double z);
double clamp_prob(double p);
double logit(double p);

struct ClassifierSpec {
    ModelKind kind = ModelKind::LogisticRegression;
    std::map<std::string, double> hyperparams;
    uint64_t seed = 0;

    double hyper(const std::string& name, double fallback) const;
    // Throws ConfigError on hyperparameter names unknown to the kind.
    void validate() const;
    json to_json() const;
    static ClassifierSpec from_json(const json& j);
};

// Allowed hyperparameter names with defaults, per kind.
const std::map<std::string, double>& hyperparam_registry(ModelKind kind);

struct LRParams {
    double l2_lambda = 0.1;
    int max_iters = 500;
    double step_size = 1.0;
    double tol = 1e-8;  // on the gradient L2 norm
};

struct LinearPayload {
    std::vector<double> coef;
    double intercept = 0.0;
    // z-score statistics from the training split; applied at predict time
    std::vector<double> feature_mean;
    std::vector<double> feature_std;
};

struct ForestPayload {
    std::vector<std::unique_ptr<TreeNode>> trees;
};

struct AdaBoostPayload {
    std::vector<std::unique_ptr<TreeNode>> stages;
    std::vector<double> alphas;
};

struct GbdtPayload {
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<std::unique_ptr<TreeNode>> trees;
};

struct TrainedModel {
    ClassifierSpec spec;
    std::vector<std::string> feature_names;
    std::variant<LinearPayload, ForestPayload, AdaBoostPayload, GbdtPayload> payload;

    double predict_one(const std::vector<double>& x) const;
    std::vector<double> predict_proba(const Matrix& X) const;
};

// Weighted binary cross-entropy with L2 on the coefficients (intercept
// unpenalized). beta = [intercept, coef...]. Exposed for the
// finite-difference oracle.
double logistic_loss(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                     const std::vector<double>& beta, double l2_lambda);
std::vector<double> logistic_grad(const Matrix& X, const std::vector<int>& y,
                                  const std::vector<double>& w, const std::vector<double>& beta,
                                  double l2_lambda);

TrainedModel fit_logistic(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                          const LRParams& params, const std::vector<std::string>& feature_names);

struct RFParams {
    int n_trees = 100;
    TreeParams tree;  // feature_subsample filled from ceil(sqrt(d))/d when <= 0
    bool bootstrap = true;
};

TrainedModel fit_random_forest(const Matrix& X, const std::vector<int>& y,
                               const std::vector<double>& w, const RFParams& params, uint64_t seed,
                               const std::vector<std::string>& feature_names);

struct AdaBoostParams {
    int n_stages = 50;
    int depth = 1;
};

TrainedModel fit_adaboost(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                          const AdaBoostParams& params, uint64_t seed,
                          const std::vector<std::string>& feature_names);

struct GbdtParams {
    int n_rounds = 100;
    double learning_rate = 0.1;
    TreeParams tree;
    GrowthPolicy growth_policy = GrowthPolicy::LevelWise;
};

TrainedModel fit_gbdt(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                      const GbdtParams& params, uint64_t seed,
                      const std::vector<std::string>& feature_names);

// Dispatch on spec.kind with hyperparameters from the registry.
TrainedModel fit_model(const ClassifierSpec& spec, const Matrix& X, const std::vector<int>& y,
                       const std::vector<double>& w, const std::vector<std::string>& feature_names);

// Checked prediction: names must match the model's training layout.
std::vector<double> predict_proba(const TrainedModel& model, const Matrix& X,
                                  const std::vector<std::string>& feature_names);

json payload_to_json(const TrainedModel& model);
TrainedModel model_from_parts(const ClassifierSpec& spec,
                              const std::vector<std::string>& feature_names, const json& payload);

}  // namespace mdrkit
