#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wlc/preprocess.hpp"

namespace wlc::shallow {

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 10;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency; results do not depend on it
};

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    float threshold = 0.0f;    // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf = -1;    // index into leaf_probs for leaves
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // preorder, root first
    std::vector<float> leaf_probs; // kNumClasses per leaf, class 1 first

    std::span<const float> leaf(std::size_t i) const {
        return std::span<const float>(leaf_probs).subspan(i * kNumClasses, kNumClasses);
    }
    std::span<const float> predict_proba(std::span<const float> x) const;
    std::size_t depth() const;
    std::size_t leaf_count() const { return leaf_probs.size() / kNumClasses; }
};

struct ForestModel {
    std::size_t dim = 0;
    ForestParams params;
    std::vector<DecisionTree> trees;
};

// Random forest of Gini trees. Each tree sees a bootstrap sample of the
// masked-in rows (same size, with replacement) and considers ceil(sqrt(d))
// non-constant features per node; splits are exact over sorted values.
// Labels are simplified class ids 1..10 where mask is set.
ForestModel rf_fit(std::span<const float> x, std::size_t dim, std::span<const std::uint8_t> labels,
                   std::span<const std::uint8_t> mask, const ForestParams& params);

// Trains on rows that are masked in and have finite sources.
ForestModel rf_fit(const preprocess::FeatureMatrix& features, std::span<const std::uint8_t> labels,
                   std::span<const std::uint8_t> mask, const ForestParams& params);

// Mean of the trees' leaf distributions.
std::array<double, kNumClasses> rf_predict_proba(const ForestModel& model, std::span<const float> x);

// argmax of the averaged distribution, lowest class id on ties.
std::uint8_t rf_predict_one(const ForestModel& model, std::span<const float> x);

// Per row; rows with non-finite sources are no-data.
std::vector<std::uint8_t> rf_predict(const ForestModel& model, const preprocess::FeatureMatrix& features,
                                     unsigned threads = 0);

} // namespace wlc::shallow
