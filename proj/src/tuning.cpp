#include "mdrkit/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "mdrkit/errors.hpp"
#include "mdrkit/metrics.hpp"
#include "mdrkit/rng.hpp"

namespace mdrkit {

namespace {

std::map<int, std::vector<size_t>> indices_by_class(const std::vector<int>& labels) {
    std::map<int, std::vector<size_t>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    return by_class;
}

}  // namespace

json SplitIndices::to_json() const {
    return json{{"train", train}, {"test", test}, {"seed", seed}};
}

SplitIndices SplitIndices::from_json(const json& j) {
    SplitIndices s;
    try {
        s.train = j.at("train").get<std::vector<size_t>>();
        s.test = j.at("test").get<std::vector<size_t>>();
        s.seed = j.at("seed").get<uint64_t>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("split indices: ") + e.what());
    }
    return s;
}

SplitIndices stratified_split(const std::vector<int>& labels, double test_fraction,
                              uint64_t seed) {
    if (labels.empty()) throw EmptyDatasetError("stratified_split: no labels");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ConfigError("stratified_split: test_fraction must be in (0, 1)");
    auto by_class = indices_by_class(labels);
    if (by_class.size() < 2)
        throw StratificationError("stratified_split: both classes must be present");

    // Per-class test counts by largest remainder against the rounded total.
    size_t total_test =
        static_cast<size_t>(std::llround(test_fraction * static_cast<double>(labels.size())));
    std::vector<int> classes;
    std::vector<size_t> base_counts;
    std::vector<std::pair<double, int>> remainders;  // (-remainder, class) for stable sort
    size_t assigned = 0;
    for (const auto& [cls, idx] : by_class) {
        double exact = test_fraction * static_cast<double>(idx.size());
        size_t base = static_cast<size_t>(std::floor(exact));
        classes.push_back(cls);
        base_counts.push_back(base);
        remainders.emplace_back(-(exact - static_cast<double>(base)), cls);
        assigned += base;
    }
    std::stable_sort(remainders.begin(), remainders.end());
    std::map<int, size_t> test_counts;
    for (size_t c = 0; c < classes.size(); ++c) test_counts[classes[c]] = base_counts[c];
    for (size_t s = 0; assigned < total_test && s < remainders.size(); ++s, ++assigned)
        ++test_counts[remainders[s].second];

    SplitIndices out;
    out.seed = seed;
    Rng rng(substream_seed(seed, "stratified_split"));
    for (auto& [cls, idx] : by_class) {
        rng.shuffle(idx);
        size_t cut = std::min(test_counts[cls], idx.size());
        for (size_t i = 0; i < idx.size(); ++i)
            (i < cut ? out.test : out.train).push_back(idx[i]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<std::vector<size_t>> stratified_kfold(const std::vector<int>& labels, int k,
                                                  uint64_t seed) {
    if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
    auto by_class = indices_by_class(labels);
    if (by_class.size() < 2)
        throw StratificationError("stratified_kfold: both classes must be present");
    for (const auto& [cls, idx] : by_class)
        if (idx.size() < static_cast<size_t>(k))
            throw StratificationError("stratified_kfold: class " + std::to_string(cls) +
                                      " has fewer members than k");

    // Allocation follows the sorted-label layout: class c occupies the
    // contiguous block starting at sum of smaller-class sizes, and fold f
    // receives the block positions congruent to f mod k. This keeps both
    // per-class counts and total fold sizes within one of each other.
    std::vector<std::vector<size_t>> folds(k);
    Rng rng(substream_seed(seed, "stratified_kfold"));
    size_t offset = 0;
    for (auto& [cls, idx] : by_class) {
        rng.shuffle(idx);
        size_t n_c = idx.size();
        size_t taken = 0;
        for (int f = 0; f < k; ++f) {
            // positions p in [offset, offset + n_c) with p % k == f
            size_t first = offset + ((static_cast<size_t>(f) + k - offset % k) % k);
            size_t count = first >= offset + n_c ? 0 : (offset + n_c - first + k - 1) / k;
            for (size_t i = 0; i < count; ++i) folds[f].push_back(idx[taken++]);
        }
        offset += n_c;
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

std::map<int, double> balanced_class_weights(const std::vector<int>& labels) {
    if (labels.empty()) throw EmptyDatasetError("balanced_class_weights: no labels");
    size_t pos = static_cast<size_t>(std::count(labels.begin(), labels.end(), 1));
    size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw DataError("balanced_class_weights: degenerate labels, one class missing");
    double n = static_cast<double>(labels.size());
    return {{0, n / (2.0 * static_cast<double>(neg))}, {1, n / (2.0 * static_cast<double>(pos))}};
}

std::vector<double> per_sample_weights(const std::vector<int>& labels) {
    auto weights = balanced_class_weights(labels);
    std::vector<double> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) out[i] = weights.at(labels[i]);
    return out;
}

std::vector<std::map<std::string, double>> Grid::expand() const {
    for (const auto& [name, list] : values)
        if (list.empty()) throw ConfigError("grid: empty candidate list for '" + name + "'");
    std::vector<std::map<std::string, double>> cells;
    std::map<std::string, double> current;
    // values is a std::map, so iteration is already lexicographic by name
    std::function<void(std::map<std::string, std::vector<double>>::const_iterator)> rec =
        [&](auto it) {
            if (it == values.end()) {
                cells.push_back(current);
                return;
            }
            auto next = std::next(it);
            for (double v : it->second) {
                current[it->first] = v;
                rec(next);
            }
        };
    rec(values.begin());
    if (cells.empty()) throw ConfigError("grid: empty cartesian product");
    return cells;
}

Grid Grid::defaults_for(ModelKind kind) {
    Grid g;
    switch (kind) {
        case ModelKind::LogisticRegression:
            g.values = {{"l2_lambda", {0.01, 0.1, 1.0}}};
            break;
        case ModelKind::RandomForest:
            g.values = {{"n_trees", {100, 300}}, {"max_depth", {8, 0}}};  // 0 = unlimited
            break;
        case ModelKind::AdaBoost:
            g.values = {{"n_stages", {50, 200}}, {"depth", {1, 2}}};
            break;
        case ModelKind::GbdtLevelWise:
            g.values = {{"n_rounds", {100, 300}},
                        {"learning_rate", {0.1, 0.3}},
                        {"max_depth", {3, 6}}};
            break;
        case ModelKind::GbdtLeafWise:
            g.values = {{"n_rounds", {100, 300}},
                        {"learning_rate", {0.1, 0.3}},
                        {"max_leaves", {15, 31}}};
            break;
    }
    return g;
}

Grid Grid::from_json(const json& j) {
    Grid g;
    try {
        for (const auto& [name, list] : j.items())
            g.values[name] = list.get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    return g;
}

json Grid::to_json() const {
    json j = json::object();
    for (const auto& [name, list] : values) j[name] = list;
    return j;
}

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    size_t n_workers = std::min<size_t>(static_cast<size_t>(threads), count);
    std::vector<std::future<void>> futures;
    futures.reserve(n_workers);
    for (size_t worker = 0; worker < n_workers; ++worker) {
        futures.push_back(std::async(std::launch::async, [&, worker]() {
            for (size_t i = worker; i < count; i += n_workers) fn(i);
        }));
    }
    for (auto& f : futures) f.get();
}

namespace {

Matrix gather_rows(const Matrix& X, const std::vector<size_t>& idx) {
    Matrix out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(X[i]);
    return out;
}

template <class T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace

TuneResult grid_search(const Matrix& X, const std::vector<int>& y, ModelKind kind,
                       const Grid& grid, int k, uint64_t seed,
                       const std::vector<std::string>& feature_names, int threads) {
    if (X.empty() || X.size() != y.size()) throw EmptyDatasetError("grid_search: bad input");
    auto cells = grid.expand();
    for (const auto& cell : cells) {
        ClassifierSpec probe{kind, cell, 0};
        probe.validate();
    }
    auto folds = stratified_kfold(y, k, substream_seed(seed, "cv_folds"));

    // Fold complements, computed once.
    std::vector<std::vector<size_t>> fold_train(folds.size());
    for (size_t f = 0; f < folds.size(); ++f) {
        std::vector<char> in_fold(y.size(), 0);
        for (size_t i : folds[f]) in_fold[i] = 1;
        for (size_t i = 0; i < y.size(); ++i)
            if (!in_fold[i]) fold_train[f].push_back(i);
    }

    const size_t n_tasks = cells.size() * folds.size();
    std::vector<double> task_scores(n_tasks, 0.0);
    parallel_for(n_tasks, threads, [&](size_t task) {
        size_t cell_idx = task / folds.size();
        size_t fold_idx = task % folds.size();
        ClassifierSpec spec{kind, cells[cell_idx], substream_seed(seed, "cell", task)};

        auto train_idx = fold_train[fold_idx];
        Matrix X_train = gather_rows(X, train_idx);
        std::vector<int> y_train = gather(y, train_idx);
        // class weights from fold-training labels only: no leakage
        std::vector<double> w_train = per_sample_weights(y_train);

        TrainedModel model = fit_model(spec, X_train, y_train, w_train, feature_names);
        Matrix X_val = gather_rows(X, folds[fold_idx]);
        std::vector<int> y_val = gather(y, folds[fold_idx]);
        auto proba = model.predict_proba(X_val);
        task_scores[task] = f1_score(y_val, threshold_labels(proba));
    });

    TuneResult result;
    result.cells.reserve(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
        CellResult cell;
        cell.hyperparams = cells[c];
        cell.fold_scores.assign(task_scores.begin() + c * folds.size(),
                                task_scores.begin() + (c + 1) * folds.size());
        double mean = std::accumulate(cell.fold_scores.begin(), cell.fold_scores.end(), 0.0) /
                      static_cast<double>(cell.fold_scores.size());
        double var = 0.0;
        for (double s : cell.fold_scores) var += (s - mean) * (s - mean);
        cell.mean_f1 = mean;
        cell.std_f1 = std::sqrt(var / static_cast<double>(cell.fold_scores.size()));
        result.cells.push_back(std::move(cell));
    }

    size_t best = 0;
    for (size_t c = 1; c < result.cells.size(); ++c) {
        const auto& a = result.cells[c];
        const auto& b = result.cells[best];
        if (a.mean_f1 > b.mean_f1 || (a.mean_f1 == b.mean_f1 && a.std_f1 < b.std_f1)) best = c;
    }
    result.best_index = best;
    result.best_spec = ClassifierSpec{kind, result.cells[best].hyperparams,
                                      substream_seed(seed, "refit")};
    result.best_model = fit_model(result.best_spec, X, y, per_sample_weights(y), feature_names);
    return result;
}

json TuneResult::to_json() const {
    json cells_json = json::array();
    for (const auto& cell : cells)
        cells_json.push_back(json{{"hyperparams", cell.hyperparams},
                                  {"mean_f1", cell.mean_f1},
                                  {"std_f1", cell.std_f1},
                                  {"fold_scores", cell.fold_scores}});
    return json{
        {"best_spec", best_spec.to_json()}, {"best_index", best_index}, {"cells", cells_json}};
}

}  // namespace mdrkit
