#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mdrkit/classifiers.hpp"
#include "mdrkit/jsonio.hpp"

namespace mdrkit {

struct SplitIndices {
    std::vector<size_t> train;
    std::vector<size_t> test;
    uint64_t seed = 0;

    json to_json() const;
    static SplitIndices from_json(const json& j);
};

// Per-class shuffle then proportional cut; the overall test size is
// round(test_fraction * n) with per-class counts assigned by largest
// remainder.
SplitIndices stratified_split(const std::vector<int>& labels, double test_fraction, uint64_t seed);

// Partition into k folds with per-class counts differing by at most one and
// fold sizes as equal as possible.
std::vector<std::vector<size_t>> stratified_kfold(const std::vector<int>& labels, int k,
                                                  uint64_t seed);

// w_c = N / (2 * N_c)
std::map<int, double> balanced_class_weights(const std::vector<int>& labels);
std::vector<double> per_sample_weights(const std::vector<int>& labels);

struct Grid {
    std::map<std::string, std::vector<double>> values;

    // Cartesian product in deterministic order: names lexicographic, values
    // in list order, first name most significant.
    std::vector<std::map<std::string, double>> expand() const;
    static Grid defaults_for(ModelKind kind);
    static Grid from_json(const json& j);
    json to_json() const;
};

struct CellResult {
    std::map<std::string, double> hyperparams;
    double mean_f1 = 0.0;
    double std_f1 = 0.0;
    std::vector<double> fold_scores;
};

struct TuneResult {
    ClassifierSpec best_spec;
    size_t best_index = 0;
    std::vector<CellResult> cells;
    TrainedModel best_model;  // refit on the full provided training rows

    json to_json() const;  // result summary without the model payload
};

// 5-fold CV grid search maximizing mean positive-class F1; class weights are
// recomputed inside each fold from fold-training labels only. Ties break to
// smaller std, then earlier expansion order.
TuneResult grid_search(const Matrix& X, const std::vector<int>& y, ModelKind kind,
                       const Grid& grid, int k, uint64_t seed,
                       const std::vector<std::string>& feature_names, int threads = 1);

// Index-strided deterministic parallel map used by grid search and the
// pipeline; results land in slot order regardless of scheduling.
void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn);

}  // namespace mdrkit
