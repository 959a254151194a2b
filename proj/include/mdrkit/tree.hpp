#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mdrkit/features.hpp"
#include "mdrkit/jsonio.hpp"

namespace mdrkit {

// Split convention: x[feature] < threshold goes left, >= goes right.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    // Leaf payload: class-probability for gini trees, additive weight for
    // boosting trees (with the gradient sums it was computed from).
    double value = 0.0;
    double sum_grad = 0.0;
    double sum_hess = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct GradHess {
    double g = 0.0;
    double h = 0.0;
};

enum class GrowthPolicy { LevelWise, LeafWise };

struct TreeParams {
    int max_depth = 6;  // 0 = unlimited
    int min_samples_leaf = 1;
    double min_child_weight = 0.0;  // minimum Hessian sum per child (boosting only)
    double lambda = 1.0;            // L2 leaf regularizer
    double gamma = 0.0;             // split-gain penalty
    GrowthPolicy growth_policy = GrowthPolicy::LevelWise;
    int max_leaves = 31;            // leaf-wise only
    double feature_subsample = 1.0; // fraction of features considered per split
    int histogram_bins = 0;         // 0 = exact greedy enumeration
};

// Weighted-Gini classification tree. Leaves store the weighted positive-class
// fraction. Candidate thresholds are midpoints between consecutive distinct
// sorted values; ties break toward the lowest feature index, then the lowest
// threshold.
std::unique_ptr<TreeNode> fit_gini_tree(const Matrix& X, const std::vector<int>& y,
                                        const std::vector<double>& w, const TreeParams& params,
                                        uint64_t seed);

// Second-order regression tree on (g, h) sums. Split gain is
// 0.5 * [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma;
// non-positive gains are rejected. Leaf weight is -G/(H+lambda).
std::unique_ptr<TreeNode> fit_newton_tree(const Matrix& X, const std::vector<GradHess>& grad_hess,
                                          const TreeParams& params);

double tree_predict(const TreeNode& tree, const std::vector<double>& x);

json tree_to_json(const TreeNode& tree);
std::unique_ptr<TreeNode> tree_from_json(const json& j);
std::unique_ptr<TreeNode> clone_tree(const TreeNode& tree);
int count_leaves(const TreeNode& tree);

}  // namespace mdrkit
