#include "mdrkit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mdrkit/errors.hpp"
#include "mdrkit/rng.hpp"

namespace mdrkit {

namespace {

constexpr double kPurityEps = 1e-12;

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double objective = 0.0;  // gini: child impurity sum (lower better); newton: gain (higher better)
};

std::vector<int> candidate_features(int d, const TreeParams& params, Rng& rng) {
    if (params.feature_subsample >= 1.0) {
        std::vector<int> all(d);
        for (int i = 0; i < d; ++i) all[i] = i;
        return all;
    }
    int k = std::max(1, static_cast<int>(std::lround(params.feature_subsample * d)));
    auto picked = rng.sample_without_replacement(static_cast<size_t>(d), static_cast<size_t>(k));
    return std::vector<int>(picked.begin(), picked.end());
}

// ---------------------------------------------------------------------------
// Gini trees

struct GiniBuilder {
    const Matrix& X;
    const std::vector<int>& y;
    const std::vector<double>& w;
    const TreeParams& params;
    Rng rng;
    int d;

    std::unique_ptr<TreeNode> build(std::vector<size_t>& idx, int depth) {
        double total_w = 0.0, pos_w = 0.0;
        for (size_t i : idx) {
            total_w += w[i];
            if (y[i] == 1) pos_w += w[i];
        }
        double p = pos_w / total_w;

        auto make_leaf = [&]() {
            auto leaf = std::make_unique<TreeNode>();
            leaf->value = p;
            return leaf;
        };

        bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        bool too_small = idx.size() < 2 * static_cast<size_t>(params.min_samples_leaf);
        bool pure = std::min(p, 1.0 - p) < kPurityEps;
        if (depth_capped || too_small || pure) return make_leaf();

        SplitChoice best = find_split(idx, total_w, pos_w);
        if (!best.found) return make_leaf();

        std::vector<size_t> left_idx, right_idx;
        for (size_t i : idx) {
            if (X[i][best.feature] < best.threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        auto node = std::make_unique<TreeNode>();
        node->feature = best.feature;
        node->threshold = best.threshold;
        node->left = build(left_idx, depth + 1);
        node->right = build(right_idx, depth + 1);
        return node;
    }

    SplitChoice find_split(const std::vector<size_t>& idx, double total_w, double pos_w) {
        SplitChoice best;
        double parent_impurity = impurity_sum(total_w, pos_w);
        std::vector<std::pair<double, size_t>> sorted;
        sorted.reserve(idx.size());
        const size_t min_leaf = static_cast<size_t>(params.min_samples_leaf);

        for (int f : candidate_features(d, params, rng)) {
            sorted.clear();
            for (size_t i : idx) sorted.emplace_back(X[i][f], i);
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double wl = 0.0, wl_pos = 0.0;
            for (size_t j = 0; j + 1 < sorted.size(); ++j) {
                size_t i = sorted[j].second;
                wl += w[i];
                if (y[i] == 1) wl_pos += w[i];
                if (sorted[j].first == sorted[j + 1].first) continue;
                size_t n_left = j + 1, n_right = sorted.size() - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;
                double obj = impurity_sum(wl, wl_pos) +
                             impurity_sum(total_w - wl, pos_w - wl_pos);
                if (!best.found || obj < best.objective) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = 0.5 * (sorted[j].first + sorted[j + 1].first);
                    best.objective = obj;
                }
            }
        }
        if (best.found && parent_impurity - best.objective <= 1e-12 * std::max(total_w, 1.0))
            best.found = false;
        return best;
    }

    static double impurity_sum(double total_w, double pos_w) {
        if (total_w <= 0.0) return 0.0;
        double p = pos_w / total_w;
        return total_w * 2.0 * p * (1.0 - p);
    }
};

// ---------------------------------------------------------------------------
// Newton trees

struct NewtonBuilder {
    const Matrix& X;
    const std::vector<GradHess>& gh;
    const TreeParams& params;
    int d;
    // histogram mode: global per-feature candidate thresholds
    std::vector<std::vector<double>> bin_edges;

    void prepare_bins() {
        if (params.histogram_bins <= 0) return;
        bin_edges.assign(d, {});
        size_t n = X.size();
        std::vector<double> values(n);
        for (int f = 0; f < d; ++f) {
            for (size_t i = 0; i < n; ++i) values[i] = X[i][f];
            std::sort(values.begin(), values.end());
            auto& edges = bin_edges[f];
            for (int b = 1; b < params.histogram_bins; ++b) {
                size_t pos = b * n / params.histogram_bins;
                if (pos == 0 || pos >= n) continue;
                if (values[pos - 1] == values[pos]) continue;
                double edge = 0.5 * (values[pos - 1] + values[pos]);
                if (edges.empty() || edge > edges.back()) edges.push_back(edge);
            }
        }
    }

    struct Candidate {
        std::vector<size_t> idx;
        double sum_g = 0.0, sum_h = 0.0;
        int depth = 0;
        uint64_t id = 0;  // creation order, the gain tie-break
        SplitChoice split;
    };

    Candidate make_candidate(std::vector<size_t>&& idx, int depth, uint64_t id) {
        Candidate c;
        c.idx = std::move(idx);
        c.depth = depth;
        c.id = id;
        for (size_t i : c.idx) {
            c.sum_g += gh[i].g;
            c.sum_h += gh[i].h;
        }
        c.split = find_split(c);
        return c;
    }

    double leaf_score(double g, double h) const { return g * g / (h + params.lambda); }

    SplitChoice find_split(const Candidate& c) {
        SplitChoice best;
        if (params.max_depth > 0 && c.depth >= params.max_depth) return best;
        if (c.idx.size() < 2 * static_cast<size_t>(params.min_samples_leaf)) return best;

        const double parent_score = leaf_score(c.sum_g, c.sum_h);
        const size_t min_leaf = static_cast<size_t>(params.min_samples_leaf);

        auto consider = [&](int f, double threshold, double gl, double hl, size_t n_left) {
            size_t n_right = c.idx.size() - n_left;
            if (n_left < min_leaf || n_right < min_leaf) return;
            double gr = c.sum_g - gl, hr = c.sum_h - hl;
            if (hl < params.min_child_weight || hr < params.min_child_weight) return;
            double gain =
                0.5 * (leaf_score(gl, hl) + leaf_score(gr, hr) - parent_score) - params.gamma;
            if (gain <= 0.0) return;
            if (!best.found || gain > best.objective) {
                best.found = true;
                best.feature = f;
                best.threshold = threshold;
                best.objective = gain;
            }
        };

        if (params.histogram_bins > 0) {
            for (int f = 0; f < d; ++f) {
                const auto& edges = bin_edges[f];
                if (edges.empty()) continue;
                std::vector<double> bg(edges.size() + 1, 0.0), bh(edges.size() + 1, 0.0);
                std::vector<size_t> bn(edges.size() + 1, 0);
                for (size_t i : c.idx) {
                    // upper_bound puts values equal to an edge in the bin to
                    // its right, matching the "< goes left" routing
                    size_t b = std::upper_bound(edges.begin(), edges.end(), X[i][f]) -
                               edges.begin();
                    bg[b] += gh[i].g;
                    bh[b] += gh[i].h;
                    ++bn[b];
                }
                double gl = 0.0, hl = 0.0;
                size_t nl = 0;
                for (size_t b = 0; b < edges.size(); ++b) {
                    gl += bg[b];
                    hl += bh[b];
                    nl += bn[b];
                    consider(f, edges[b], gl, hl, nl);
                }
            }
            return best;
        }

        std::vector<std::pair<double, size_t>> sorted;
        sorted.reserve(c.idx.size());
        for (int f = 0; f < d; ++f) {
            sorted.clear();
            for (size_t i : c.idx) sorted.emplace_back(X[i][f], i);
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double gl = 0.0, hl = 0.0;
            for (size_t j = 0; j + 1 < sorted.size(); ++j) {
                size_t i = sorted[j].second;
                gl += gh[i].g;
                hl += gh[i].h;
                if (sorted[j].first == sorted[j + 1].first) continue;
                consider(f, 0.5 * (sorted[j].first + sorted[j + 1].first), gl, hl, j + 1);
            }
        }
        return best;
    }

    std::unique_ptr<TreeNode> to_leaf(const Candidate& c) {
        auto leaf = std::make_unique<TreeNode>();
        leaf->sum_grad = c.sum_g;
        leaf->sum_hess = c.sum_h;
        leaf->value = -c.sum_g / (c.sum_h + params.lambda);
        return leaf;
    }

    std::pair<Candidate, Candidate> split_candidate(Candidate& c, uint64_t left_id,
                                                    uint64_t right_id) {
        std::vector<size_t> left_idx, right_idx;
        for (size_t i : c.idx) {
            if (X[i][c.split.feature] < c.split.threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        return {make_candidate(std::move(left_idx), c.depth + 1, left_id),
                make_candidate(std::move(right_idx), c.depth + 1, right_id)};
    }

    std::unique_ptr<TreeNode> build_level_wise(Candidate&& root_cand, uint64_t& next_id) {
        if (!root_cand.split.found) return to_leaf(root_cand);
        auto node = std::make_unique<TreeNode>();
        node->feature = root_cand.split.feature;
        node->threshold = root_cand.split.threshold;
        auto [left, right] = split_candidate(root_cand, next_id++, next_id++);
        node->left = build_level_wise(std::move(left), next_id);
        node->right = build_level_wise(std::move(right), next_id);
        return node;
    }

    std::unique_ptr<TreeNode> build_leaf_wise(Candidate&& root_cand) {
        // Slot-addressed open set; each open leaf owns a TreeNode to fill in.
        struct Open {
            Candidate cand;
            TreeNode* node;
        };
        auto root = std::make_unique<TreeNode>();
        std::vector<Open> open;
        open.push_back({std::move(root_cand), root.get()});
        int n_leaves = 1;
        uint64_t next_id = 1;

        while (n_leaves < params.max_leaves) {
            int best_slot = -1;
            for (int s = 0; s < static_cast<int>(open.size()); ++s) {
                const auto& o = open[s];
                if (!o.cand.split.found) continue;
                if (best_slot < 0 || o.cand.split.objective > open[best_slot].cand.split.objective ||
                    (o.cand.split.objective == open[best_slot].cand.split.objective &&
                     o.cand.id < open[best_slot].cand.id))
                    best_slot = s;
            }
            if (best_slot < 0) break;

            Open chosen = std::move(open[best_slot]);
            open.erase(open.begin() + best_slot);
            chosen.node->feature = chosen.cand.split.feature;
            chosen.node->threshold = chosen.cand.split.threshold;
            chosen.node->left = std::make_unique<TreeNode>();
            chosen.node->right = std::make_unique<TreeNode>();
            auto [left, right] = split_candidate(chosen.cand, next_id++, next_id++);
            open.push_back({std::move(left), chosen.node->left.get()});
            open.push_back({std::move(right), chosen.node->right.get()});
            ++n_leaves;
        }
        for (auto& o : open) {
            auto leaf = to_leaf(o.cand);
            o.node->value = leaf->value;
            o.node->sum_grad = leaf->sum_grad;
            o.node->sum_hess = leaf->sum_hess;
        }
        return root;
    }
};

}  // namespace

std::unique_ptr<TreeNode> fit_gini_tree(const Matrix& X, const std::vector<int>& y,
                                        const std::vector<double>& w, const TreeParams& params,
                                        uint64_t seed) {
    if (X.empty() || y.size() != X.size() || w.size() != X.size())
        throw EmptyDatasetError("fit_gini_tree: empty or mismatched input");
    for (double wi : w)
        if (!(wi > 0.0)) throw NumericError("fit_gini_tree: weights must be positive");
    GiniBuilder builder{X, y, w, params, Rng(seed), static_cast<int>(X[0].size())};
    std::vector<size_t> idx(X.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return builder.build(idx, 0);
}

std::unique_ptr<TreeNode> fit_newton_tree(const Matrix& X, const std::vector<GradHess>& grad_hess,
                                          const TreeParams& params) {
    if (X.empty() || grad_hess.size() != X.size())
        throw EmptyDatasetError("fit_newton_tree: empty or mismatched input");
    for (const auto& gh : grad_hess)
        if (gh.h < 0.0) throw NumericError("fit_newton_tree: negative Hessian");
    NewtonBuilder builder{X, grad_hess, params, static_cast<int>(X[0].size()), {}};
    builder.prepare_bins();
    std::vector<size_t> idx(X.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    uint64_t next_id = 1;
    auto root = builder.make_candidate(std::move(idx), 0, 0);
    if (params.growth_policy == GrowthPolicy::LeafWise)
        return builder.build_leaf_wise(std::move(root));
    return builder.build_level_wise(std::move(root), next_id);
}

double tree_predict(const TreeNode& tree, const std::vector<double>& x) {
    const TreeNode* node = &tree;
    while (!node->is_leaf()) {
        if (static_cast<size_t>(node->feature) >= x.size())
            throw DataError("tree_predict: feature index out of range");
        node = x[node->feature] < node->threshold ? node->left.get() : node->right.get();
    }
    return node->value;
}

json tree_to_json(const TreeNode& tree) {
    if (tree.is_leaf())
        return json{{"leaf", tree.value}, {"sum_grad", tree.sum_grad}, {"sum_hess", tree.sum_hess}};
    return json{{"feature", tree.feature},
                {"threshold", tree.threshold},
                {"left", tree_to_json(*tree.left)},
                {"right", tree_to_json(*tree.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
    auto node = std::make_unique<TreeNode>();
    try {
        if (j.contains("leaf")) {
            node->value = j.at("leaf").get<double>();
            node->sum_grad = j.value("sum_grad", 0.0);
            node->sum_hess = j.value("sum_hess", 0.0);
        } else {
            node->feature = j.at("feature").get<int>();
            node->threshold = j.at("threshold").get<double>();
            node->left = tree_from_json(j.at("left"));
            node->right = tree_from_json(j.at("right"));
        }
    } catch (const json::exception& e) {
        throw ModelLoadError(std::string("tree: ") + e.what());
    }
    return node;
}

std::unique_ptr<TreeNode> clone_tree(const TreeNode& tree) {
    auto node = std::make_unique<TreeNode>();
    node->feature = tree.feature;
    node->threshold = tree.threshold;
    node->value = tree.value;
    node->sum_grad = tree.sum_grad;
    node->sum_hess = tree.sum_hess;
    if (!tree.is_leaf()) {
        node->left = clone_tree(*tree.left);
        node->right = clone_tree(*tree.right);
    }
    return node;
}

int count_leaves(const TreeNode& tree) {
    if (tree.is_leaf()) return 1;
    return count_leaves(*tree.left) + count_leaves(*tree.right);
}

}  // namespace mdrkit
