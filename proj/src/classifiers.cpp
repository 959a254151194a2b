#include "mdrkit/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdrkit/errors.hpp"
#include "mdrkit/rng.hpp"

namespace mdrkit {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

double logit(double p) {
    p = clamp_prob(p);
    return std::log(p / (1.0 - p));
}

const char* kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogisticRegression: return "logistic_regression";
        case ModelKind::RandomForest: return "random_forest";
        case ModelKind::AdaBoost: return "adaboost";
        case ModelKind::GbdtLevelWise: return "gbdt_level_wise";
        case ModelKind::GbdtLeafWise: return "gbdt_leaf_wise";
    }
    return "unknown";
}

ModelKind kind_from_name(const std::string& name) {
    for (ModelKind k : all_model_kinds())
        if (name == kind_name(k)) return k;
    throw ConfigError("unknown model kind: " + name);
}

std::vector<ModelKind> all_model_kinds() {
    return {ModelKind::LogisticRegression, ModelKind::RandomForest, ModelKind::AdaBoost,
            ModelKind::GbdtLevelWise, ModelKind::GbdtLeafWise};
}

const std::map<std::string, double>& hyperparam_registry(ModelKind kind) {
    static const std::map<std::string, double> lr{
        {"l2_lambda", 0.1}, {"max_iters", 500}, {"step_size", 1.0}, {"tol", 1e-8}};
    static const std::map<std::string, double> rf{{"n_trees", 100},
                                                  {"max_depth", 0},  // 0 = unlimited
                                                  {"min_samples_leaf", 1},
                                                  {"bootstrap", 1}};
    static const std::map<std::string, double> ab{{"n_stages", 50}, {"depth", 1}};
    static const std::map<std::string, double> gbdt_level{
        {"n_rounds", 100},  {"learning_rate", 0.1}, {"max_depth", 3},
        {"lambda", 1.0},    {"gamma", 0.0},         {"min_child_weight", 0.0}};
    static const std::map<std::string, double> gbdt_leaf{
        {"n_rounds", 100},  {"learning_rate", 0.1},     {"max_leaves", 31},
        {"lambda", 1.0},    {"gamma", 0.0},             {"min_child_weight", 0.0},
        {"histogram_bins", 0}};
    switch (kind) {
        case ModelKind::LogisticRegression: return lr;
        case ModelKind::RandomForest: return rf;
        case ModelKind::AdaBoost: return ab;
        case ModelKind::GbdtLevelWise: return gbdt_level;
        case ModelKind::GbdtLeafWise: return gbdt_leaf;
    }
    return lr;
}

double ClassifierSpec::hyper(const std::string& name, double fallback) const {
    auto it = hyperparams.find(name);
    return it == hyperparams.end() ? fallback : it->second;
}

void ClassifierSpec::validate() const {
    const auto& registry = hyperparam_registry(kind);
    for (const auto& [name, value] : hyperparams)
        if (!registry.count(name))
            throw ConfigError(std::string("hyperparameter '") + name + "' unknown for kind " +
                              kind_name(kind));
}

json ClassifierSpec::to_json() const {
    return json{{"kind", kind_name(kind)}, {"hyperparams", hyperparams}, {"seed", seed}};
}

ClassifierSpec ClassifierSpec::from_json(const json& j) {
    ClassifierSpec spec;
    try {
        spec.kind = kind_from_name(j.at("kind").get<std::string>());
        spec.hyperparams = j.at("hyperparams").get<std::map<std::string, double>>();
        spec.seed = j.at("seed").get<uint64_t>();
    } catch (const json::exception& e) {
        throw ModelLoadError(std::string("spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Logistic regression

double logistic_loss(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                     const std::vector<double>& beta, double l2_lambda) {
    double loss = 0.0;
    for (size_t i = 0; i < X.size(); ++i) {
        double z = beta[0];
        for (size_t f = 0; f < X[i].size(); ++f) z += beta[f + 1] * X[i][f];
        double p = clamp_prob(sigmoid(z));
        loss -= w[i] * (y[i] == 1 ? std::log(p) : std::log(1.0 - p));
    }
    double reg = 0.0;
    for (size_t f = 1; f < beta.size(); ++f) reg += beta[f] * beta[f];
    return loss + 0.5 * l2_lambda * reg;
}

std::vector<double> logistic_grad(const Matrix& X, const std::vector<int>& y,
                                  const std::vector<double>& w, const std::vector<double>& beta,
                                  double l2_lambda) {
    std::vector<double> grad(beta.size(), 0.0);
    for (size_t i = 0; i < X.size(); ++i) {
        double z = beta[0];
        for (size_t f = 0; f < X[i].size(); ++f) z += beta[f + 1] * X[i][f];
        double residual = w[i] * (sigmoid(z) - static_cast<double>(y[i]));
        grad[0] += residual;
        for (size_t f = 0; f < X[i].size(); ++f) grad[f + 1] += residual * X[i][f];
    }
    for (size_t f = 1; f < beta.size(); ++f) grad[f] += l2_lambda * beta[f];
    return grad;
}

namespace {

void check_finite(const Matrix& X) {
    for (const auto& row : X)
        for (double v : row)
            if (!std::isfinite(v)) throw NumericError("non-finite feature value");
}

struct Standardizer {
    std::vector<double> mean, stddev;

    static Standardizer fit(const Matrix& X) {
        Standardizer s;
        size_t n = X.size(), d = X[0].size();
        s.mean.assign(d, 0.0);
        s.stddev.assign(d, 0.0);
        for (const auto& row : X)
            for (size_t f = 0; f < d; ++f) s.mean[f] += row[f];
        for (size_t f = 0; f < d; ++f) s.mean[f] /= static_cast<double>(n);
        for (const auto& row : X)
            for (size_t f = 0; f < d; ++f) {
                double c = row[f] - s.mean[f];
                s.stddev[f] += c * c;
            }
        for (size_t f = 0; f < d; ++f) {
            s.stddev[f] = std::sqrt(s.stddev[f] / static_cast<double>(n));
            if (s.stddev[f] < 1e-12) s.stddev[f] = 1.0;  // constant feature
        }
        return s;
    }

    Matrix apply(const Matrix& X) const {
        Matrix out = X;
        for (auto& row : out)
            for (size_t f = 0; f < row.size(); ++f) row[f] = (row[f] - mean[f]) / stddev[f];
        return out;
    }
};

}  // namespace

TrainedModel fit_logistic(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                          const LRParams& params, const std::vector<std::string>& feature_names) {
    if (X.empty()) throw EmptyDatasetError("fit_logistic: empty input");
    if (params.max_iters < 0) throw ConfigError("fit_logistic: negative iteration budget");
    check_finite(X);

    Standardizer stats = Standardizer::fit(X);
    Matrix Xs = stats.apply(X);

    std::vector<double> beta(Xs[0].size() + 1, 0.0);
    double step = params.step_size;
    double loss = logistic_loss(Xs, y, w, beta, params.l2_lambda);

    for (int iter = 0; iter < params.max_iters; ++iter) {
        std::vector<double> grad = logistic_grad(Xs, y, w, beta, params.l2_lambda);
        double grad_norm_sq = 0.0;
        for (double g : grad) grad_norm_sq += g * g;
        if (std::sqrt(grad_norm_sq) <= params.tol) break;

        // Backtracking line search on the Armijo condition.
        double t = step;
        std::vector<double> candidate(beta.size());
        double new_loss = loss;
        for (int bt = 0; bt < 60; ++bt) {
            for (size_t f = 0; f < beta.size(); ++f) candidate[f] = beta[f] - t * grad[f];
            new_loss = logistic_loss(Xs, y, w, candidate, params.l2_lambda);
            if (new_loss <= loss - 1e-4 * t * grad_norm_sq) break;
            t *= 0.5;
        }
        if (new_loss >= loss) break;  // no descent possible at machine precision
        beta = candidate;
        loss = new_loss;
        step = std::min(params.step_size, t * 2.0);  // reuse the accepted scale
    }

    TrainedModel model;
    model.spec.kind = ModelKind::LogisticRegression;
    model.spec.hyperparams = {{"l2_lambda", params.l2_lambda},
                              {"max_iters", static_cast<double>(params.max_iters)},
                              {"step_size", params.step_size},
                              {"tol", params.tol}};
    model.feature_names = feature_names;
    LinearPayload payload;
    payload.intercept = beta[0];
    payload.coef.assign(beta.begin() + 1, beta.end());
    payload.feature_mean = stats.mean;
    payload.feature_std = stats.stddev;
    model.payload = std::move(payload);
    return model;
}

// ---------------------------------------------------------------------------
// Random forest

TrainedModel fit_random_forest(const Matrix& X, const std::vector<int>& y,
                               const std::vector<double>& w, const RFParams& params, uint64_t seed,
                               const std::vector<std::string>& feature_names) {
    if (X.empty()) throw EmptyDatasetError("fit_random_forest: empty input");
    if (params.n_trees < 1) throw ConfigError("fit_random_forest: n_trees must be >= 1");

    const size_t n = X.size();
    const int d = static_cast<int>(X[0].size());
    TreeParams tree_params = params.tree;
    if (tree_params.feature_subsample <= 0.0)
        tree_params.feature_subsample = std::ceil(std::sqrt(static_cast<double>(d))) / d;

    ForestPayload payload;
    payload.trees.reserve(params.n_trees);
    for (int t = 0; t < params.n_trees; ++t) {
        uint64_t tree_seed = substream_seed(seed, "rf_tree", static_cast<uint64_t>(t));
        if (params.bootstrap) {
            Rng rng(substream_seed(seed, "rf_bootstrap", static_cast<uint64_t>(t)));
            Matrix Xb;
            std::vector<int> yb;
            std::vector<double> wb;
            Xb.reserve(n);
            yb.reserve(n);
            wb.reserve(n);
            for (size_t i = 0; i < n; ++i) {
                size_t j = static_cast<size_t>(rng.below(n));
                Xb.push_back(X[j]);
                yb.push_back(y[j]);
                wb.push_back(w[j]);
            }
            payload.trees.push_back(fit_gini_tree(Xb, yb, wb, tree_params, tree_seed));
        } else {
            payload.trees.push_back(fit_gini_tree(X, y, w, tree_params, tree_seed));
        }
    }

    TrainedModel model;
    model.spec.kind = ModelKind::RandomForest;
    model.spec.seed = seed;
    model.spec.hyperparams = {{"n_trees", static_cast<double>(params.n_trees)},
                              {"max_depth", static_cast<double>(tree_params.max_depth)},
                              {"min_samples_leaf", static_cast<double>(tree_params.min_samples_leaf)},
                              {"bootstrap", params.bootstrap ? 1.0 : 0.0}};
    model.feature_names = feature_names;
    model.payload = std::move(payload);
    return model;
}

// ---------------------------------------------------------------------------
// AdaBoost (binary SAMME)

TrainedModel fit_adaboost(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                          const AdaBoostParams& params, uint64_t seed,
                          const std::vector<std::string>& feature_names) {
    if (X.empty()) throw EmptyDatasetError("fit_adaboost: empty input");
    if (params.n_stages < 1) throw ConfigError("fit_adaboost: n_stages must be >= 1");

    const size_t n = X.size();
    std::vector<double> weights = w;
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& wi : weights) wi /= wsum;

    TreeParams stump_params;
    stump_params.max_depth = params.depth;
    stump_params.min_samples_leaf = 1;

    AdaBoostPayload payload;
    for (int m = 0; m < params.n_stages; ++m) {
        uint64_t stage_seed = substream_seed(seed, "ab_stage", static_cast<uint64_t>(m));
        auto stump = fit_gini_tree(X, y, weights, stump_params, stage_seed);

        std::vector<int> miss(n, 0);
        double err = 0.0;
        for (size_t i = 0; i < n; ++i) {
            int pred = tree_predict(*stump, X[i]) >= 0.5 ? 1 : 0;
            if (pred != y[i]) {
                miss[i] = 1;
                err += weights[i];
            }
        }
        if (err >= 0.5) break;  // weak-learner contract violated; stop

        double clamped = std::clamp(err, 1e-12, 1.0 - 1e-12);
        double alpha = std::log((1.0 - clamped) / clamped);
        payload.stages.push_back(std::move(stump));
        payload.alphas.push_back(alpha);
        if (err == 0.0) break;  // perfect stage

        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (miss[i]) weights[i] *= std::exp(alpha);
            total += weights[i];
        }
        for (auto& wi : weights) wi /= total;
    }

    TrainedModel model;
    model.spec.kind = ModelKind::AdaBoost;
    model.spec.seed = seed;
    model.spec.hyperparams = {{"n_stages", static_cast<double>(params.n_stages)},
                              {"depth", static_cast<double>(params.depth)}};
    model.feature_names = feature_names;
    model.payload = std::move(payload);
    return model;
}

// ---------------------------------------------------------------------------
// Gradient-boosted trees (second-order, logistic loss)

TrainedModel fit_gbdt(const Matrix& X, const std::vector<int>& y, const std::vector<double>& w,
                      const GbdtParams& params, uint64_t seed,
                      const std::vector<std::string>& feature_names) {
    if (X.empty()) throw EmptyDatasetError("fit_gbdt: empty input");
    if (params.n_rounds < 1) throw ConfigError("fit_gbdt: n_rounds must be >= 1");
    if (params.learning_rate <= 0.0 || params.learning_rate > 1.0)
        throw ConfigError("fit_gbdt: learning_rate must be in (0, 1]");

    const size_t n = X.size();
    double wsum = 0.0, wpos = 0.0;
    for (size_t i = 0; i < n; ++i) {
        wsum += w[i];
        if (y[i] == 1) wpos += w[i];
    }
    const double base_score = logit(wpos / wsum);

    TreeParams tree_params = params.tree;
    tree_params.growth_policy = params.growth_policy;

    std::vector<double> margin(n, base_score);
    std::vector<GradHess> gh(n);

    GbdtPayload payload;
    payload.base_score = base_score;
    payload.learning_rate = params.learning_rate;
    payload.trees.reserve(params.n_rounds);

    for (int round = 0; round < params.n_rounds; ++round) {
        for (size_t i = 0; i < n; ++i) {
            double p = clamp_prob(sigmoid(margin[i]));
            gh[i].g = w[i] * (p - static_cast<double>(y[i]));
            gh[i].h = w[i] * p * (1.0 - p);
        }
        auto tree = fit_newton_tree(X, gh, tree_params);
        for (size_t i = 0; i < n; ++i)
            margin[i] += params.learning_rate * tree_predict(*tree, X[i]);
        payload.trees.push_back(std::move(tree));
    }

    TrainedModel model;
    model.spec.kind = params.growth_policy == GrowthPolicy::LeafWise ? ModelKind::GbdtLeafWise
                                                                     : ModelKind::GbdtLevelWise;
    model.spec.seed = seed;
    model.spec.hyperparams = {{"n_rounds", static_cast<double>(params.n_rounds)},
                              {"learning_rate", params.learning_rate},
                              {"lambda", tree_params.lambda},
                              {"gamma", tree_params.gamma},
                              {"min_child_weight", tree_params.min_child_weight}};
    if (params.growth_policy == GrowthPolicy::LeafWise) {
        model.spec.hyperparams["max_leaves"] = static_cast<double>(tree_params.max_leaves);
        model.spec.hyperparams["histogram_bins"] = static_cast<double>(tree_params.histogram_bins);
    } else {
        model.spec.hyperparams["max_depth"] = static_cast<double>(tree_params.max_depth);
    }
    model.feature_names = feature_names;
    model.payload = std::move(payload);
    return model;
}

// ---------------------------------------------------------------------------
// Prediction

double TrainedModel::predict_one(const std::vector<double>& x) const {
    if (std::holds_alternative<LinearPayload>(payload)) {
        const auto& lin = std::get<LinearPayload>(payload);
        double z = lin.intercept;
        for (size_t f = 0; f < lin.coef.size(); ++f)
            z += lin.coef[f] * (x[f] - lin.feature_mean[f]) / lin.feature_std[f];
        return sigmoid(z);
    }
    if (std::holds_alternative<ForestPayload>(payload)) {
        const auto& forest = std::get<ForestPayload>(payload);
        double sum = 0.0;
        for (const auto& tree : forest.trees) sum += tree_predict(*tree, x);
        return sum / static_cast<double>(forest.trees.size());
    }
    if (std::holds_alternative<AdaBoostPayload>(payload)) {
        const auto& ab = std::get<AdaBoostPayload>(payload);
        if (ab.stages.empty()) return 0.5;
        double alpha_sum = 0.0, score = 0.0;
        for (size_t m = 0; m < ab.stages.size(); ++m) {
            double vote = tree_predict(*ab.stages[m], x) >= 0.5 ? 1.0 : -1.0;
            score += ab.alphas[m] * vote;
            alpha_sum += ab.alphas[m];
        }
        return sigmoid(score / alpha_sum);
    }
    const auto& gbdt = std::get<GbdtPayload>(payload);
    double margin = gbdt.base_score;
    for (const auto& tree : gbdt.trees) margin += gbdt.learning_rate * tree_predict(*tree, x);
    return sigmoid(margin);
}

std::vector<double> TrainedModel::predict_proba(const Matrix& X) const {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& x : X) {
        if (x.size() != feature_names.size())
            throw SchemaError("predict_proba: feature dimension mismatch");
        out.push_back(predict_one(x));
    }
    return out;
}

std::vector<double> predict_proba(const TrainedModel& model, const Matrix& X,
                                  const std::vector<std::string>& feature_names) {
    if (feature_names != model.feature_names)
        throw SchemaError("predict_proba: feature names do not match the model");
    return model.predict_proba(X);
}

// ---------------------------------------------------------------------------
// fit_model dispatch + payload serialization

TrainedModel fit_model(const ClassifierSpec& spec, const Matrix& X, const std::vector<int>& y,
                       const std::vector<double>& w,
                       const std::vector<std::string>& feature_names) {
    spec.validate();
    const auto& reg = hyperparam_registry(spec.kind);
    auto get = [&](const std::string& name) { return spec.hyper(name, reg.at(name)); };

    TrainedModel model;
    switch (spec.kind) {
        case ModelKind::LogisticRegression: {
            LRParams p;
            p.l2_lambda = get("l2_lambda");
            p.max_iters = static_cast<int>(get("max_iters"));
            p.step_size = get("step_size");
            p.tol = get("tol");
            model = fit_logistic(X, y, w, p, feature_names);
            break;
        }
        case ModelKind::RandomForest: {
            RFParams p;
            p.n_trees = static_cast<int>(get("n_trees"));
            p.tree.max_depth = static_cast<int>(get("max_depth"));
            p.tree.min_samples_leaf = static_cast<int>(get("min_samples_leaf"));
            p.tree.feature_subsample = 0.0;  // ceil(sqrt(d))/d
            p.bootstrap = get("bootstrap") != 0.0;
            model = fit_random_forest(X, y, w, p, spec.seed, feature_names);
            break;
        }
        case ModelKind::AdaBoost: {
            AdaBoostParams p;
            p.n_stages = static_cast<int>(get("n_stages"));
            p.depth = static_cast<int>(get("depth"));
            model = fit_adaboost(X, y, w, p, spec.seed, feature_names);
            break;
        }
        case ModelKind::GbdtLevelWise:
        case ModelKind::GbdtLeafWise: {
            GbdtParams p;
            p.n_rounds = static_cast<int>(get("n_rounds"));
            p.learning_rate = get("learning_rate");
            p.tree.lambda = get("lambda");
            p.tree.gamma = get("gamma");
            p.tree.min_child_weight = get("min_child_weight");
            if (spec.kind == ModelKind::GbdtLeafWise) {
                p.growth_policy = GrowthPolicy::LeafWise;
                p.tree.max_leaves = static_cast<int>(get("max_leaves"));
                p.tree.max_depth = 0;
                p.tree.histogram_bins = static_cast<int>(get("histogram_bins"));
            } else {
                p.growth_policy = GrowthPolicy::LevelWise;
                p.tree.max_depth = static_cast<int>(get("max_depth"));
            }
            model = fit_gbdt(X, y, w, p, spec.seed, feature_names);
            break;
        }
    }
    model.spec.hyperparams = spec.hyperparams;
    model.spec.seed = spec.seed;
    return model;
}

json payload_to_json(const TrainedModel& model) {
    if (std::holds_alternative<LinearPayload>(model.payload)) {
        const auto& lin = std::get<LinearPayload>(model.payload);
        return json{{"type", "linear"},
                    {"coef", lin.coef},
                    {"intercept", lin.intercept},
                    {"feature_mean", lin.feature_mean},
                    {"feature_std", lin.feature_std}};
    }
    if (std::holds_alternative<ForestPayload>(model.payload)) {
        const auto& forest = std::get<ForestPayload>(model.payload);
        json trees = json::array();
        for (const auto& t : forest.trees) trees.push_back(tree_to_json(*t));
        return json{{"type", "forest"}, {"trees", trees}};
    }
    if (std::holds_alternative<AdaBoostPayload>(model.payload)) {
        const auto& ab = std::get<AdaBoostPayload>(model.payload);
        json stages = json::array();
        for (const auto& t : ab.stages) stages.push_back(tree_to_json(*t));
        return json{{"type", "adaboost"}, {"stages", stages}, {"alphas", ab.alphas}};
    }
    const auto& gbdt = std::get<GbdtPayload>(model.payload);
    json trees = json::array();
    for (const auto& t : gbdt.trees) trees.push_back(tree_to_json(*t));
    return json{{"type", "gbdt"},
                {"base_score", gbdt.base_score},
                {"learning_rate", gbdt.learning_rate},
                {"trees", trees}};
}

TrainedModel model_from_parts(const ClassifierSpec& spec,
                              const std::vector<std::string>& feature_names, const json& payload) {
    TrainedModel model;
    model.spec = spec;
    model.feature_names = feature_names;
    try {
        std::string type = payload.at("type").get<std::string>();
        if (type == "linear") {
            LinearPayload lin;
            lin.coef = payload.at("coef").get<std::vector<double>>();
            lin.intercept = payload.at("intercept").get<double>();
            lin.feature_mean = payload.at("feature_mean").get<std::vector<double>>();
            lin.feature_std = payload.at("feature_std").get<std::vector<double>>();
            model.payload = std::move(lin);
        } else if (type == "forest") {
            ForestPayload forest;
            for (const auto& t : payload.at("trees")) forest.trees.push_back(tree_from_json(t));
            model.payload = std::move(forest);
        } else if (type == "adaboost") {
            AdaBoostPayload ab;
            for (const auto& t : payload.at("stages")) ab.stages.push_back(tree_from_json(t));
            ab.alphas = payload.at("alphas").get<std::vector<double>>();
            model.payload = std::move(ab);
        } else if (type == "gbdt") {
            GbdtPayload gbdt;
            gbdt.base_score = payload.at("base_score").get<double>();
            gbdt.learning_rate = payload.at("learning_rate").get<double>();
            for (const auto& t : payload.at("trees")) gbdt.trees.push_back(tree_from_json(t));
            model.payload = std::move(gbdt);
        } else {
            throw ModelLoadError("unknown payload type: " + type);
        }
    } catch (const json::exception& e) {
        throw ModelLoadError(std::string("payload: ") + e.what());
    }
    return model;
}

}  // namespace mdrkit
